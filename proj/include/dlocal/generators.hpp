#pragma once

#include "dlocal/graph.hpp"
#include "dlocal/hypergraph.hpp"
#include "dlocal/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace dlocal::gen
{
    inline Graph path(int n)
    {
        if (n < 1)
            throw GeneratorError("path: n must be >= 1");
        std::vector<Edge> es;
        for (int i = 0; i + 1 < n; ++i)
            es.emplace_back(i, i + 1);
        return build_graph(static_cast<std::size_t>(n), es);
    }

    inline Graph cycle(int n)
    {
        if (n < 3)
            throw GeneratorError("cycle: n must be >= 3");
        std::vector<Edge> es;
        for (int i = 0; i < n; ++i)
            es.emplace_back(i, (i + 1) % n);
        return build_graph(static_cast<std::size_t>(n), es);
    }

    inline Graph complete(int n)
    {
        if (n < 1)
            throw GeneratorError("complete: n must be >= 1");
        std::vector<Edge> es;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                es.emplace_back(i, j);
        return build_graph(static_cast<std::size_t>(n), es);
    }

    /// w x h grid; node (x, y) has index y*w + x.
    inline Graph grid(int w, int h)
    {
        if (w < 1 || h < 1)
            throw GeneratorError("grid: dimensions must be >= 1");
        std::vector<Edge> es;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
            {
                const int v = y * w + x;
                if (x + 1 < w)
                    es.emplace_back(v, v + 1);
                if (y + 1 < h)
                    es.emplace_back(v, v + w);
            }
        return build_graph(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), es);
    }

    /// Perfect matchings of k disjoint edges.
    inline Graph disjoint_edges(int k)
    {
        std::vector<Edge> es;
        for (int i = 0; i < k; ++i)
            es.emplace_back(2 * i, 2 * i + 1);
        return build_graph(static_cast<std::size_t>(2 * k), es);
    }

    template <class T>
    void shuffle(std::vector<T>& v, Rng& rng)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng.uniform_below(i)]);
    }

    /// Uniform-ish simple d-regular graph by the configuration model with restarts.
    inline Graph random_regular(int n, int d, std::uint64_t seed)
    {
        if (n < 1 || d < 0 || d >= n || (static_cast<long long>(n) * d) % 2 != 0)
            throw GeneratorError("random_regular: infeasible (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
        Rng rng(stream_seed(seed, 0x5e6));
        for (int attempt = 0; attempt < 10000; ++attempt)
        {
            std::vector<int> stubs;
            stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
            for (int v = 0; v < n; ++v)
                for (int k = 0; k < d; ++k)
                    stubs.push_back(v);
            shuffle(stubs, rng);
            std::set<Edge> seen;
            bool ok = true;
            for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
            {
                int a = stubs[i], b = stubs[i + 1];
                if (a == b)
                {
                    ok = false;
                    break;
                }
                if (a > b)
                    std::swap(a, b);
                if (!seen.insert({a, b}).second)
                {
                    ok = false;
                    break;
                }
            }
            if (ok)
                return build_graph(static_cast<std::size_t>(n), std::vector<Edge>(seen.begin(), seen.end()));
        }
        throw GeneratorError("random_regular: too many rejected pairings");
    }

    /// G(n, m): m distinct uniform edges.
    inline Graph gnm(int n, std::size_t m, std::uint64_t seed)
    {
        const std::size_t max_m = static_cast<std::size_t>(n) * static_cast<std::size_t>(n > 0 ? n - 1 : 0) / 2;
        if (n < 1 || m > max_m)
            throw GeneratorError("gnm: too many edges");
        Rng rng(stream_seed(seed, 0x6e3));
        std::set<Edge> es;
        while (es.size() < m)
        {
            int a = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
            int b = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
            if (a == b)
                continue;
            if (a > b)
                std::swap(a, b);
            es.insert({a, b});
        }
        return build_graph(static_cast<std::size_t>(n), std::vector<Edge>(es.begin(), es.end()));
    }

    /// Random graph with maximum degree <= max_deg: up to `attempts` uniform pair proposals.
    inline Graph bounded_degree(int n, int max_deg, std::size_t attempts, std::uint64_t seed)
    {
        if (n < 1 || max_deg < 0)
            throw GeneratorError("bounded_degree: bad parameters");
        Rng rng(stream_seed(seed, 0xbd));
        std::vector<int> deg(static_cast<std::size_t>(n), 0);
        std::set<Edge> es;
        for (std::size_t t = 0; t < attempts && n > 1; ++t)
        {
            int a = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
            int b = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
            if (a == b || deg[static_cast<std::size_t>(a)] >= max_deg || deg[static_cast<std::size_t>(b)] >= max_deg)
                continue;
            if (a > b)
                std::swap(a, b);
            if (es.insert({a, b}).second)
            {
                ++deg[static_cast<std::size_t>(a)];
                ++deg[static_cast<std::size_t>(b)];
            }
        }
        return build_graph(static_cast<std::size_t>(n), std::vector<Edge>(es.begin(), es.end()));
    }

    inline Graph random_tree(int n, std::uint64_t seed)
    {
        if (n < 1)
            throw GeneratorError("random_tree: n must be >= 1");
        Rng rng(stream_seed(seed, 0x7ee));
        std::vector<Edge> es;
        for (int v = 1; v < n; ++v)
            es.emplace_back(static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(v))), v);
        return build_graph(static_cast<std::size_t>(n), es);
    }

    /// Graph whose edge set is a union of `forests` random spanning forests, with the
    /// forest index of every edge as an arboricity certificate.
    struct CertifiedGraph
    {
        Graph graph;
        int arboricity_bound = 0;
        std::vector<int> forest_of_edge; // aligned with graph.edges()
    };

    inline CertifiedGraph forest_union(int n, int forests, std::uint64_t seed)
    {
        if (n < 1 || forests < 1)
            throw GeneratorError("forest_union: bad parameters");
        Rng rng(stream_seed(seed, 0xf0));
        std::vector<std::pair<Edge, int>> tagged;
        std::set<Edge> seen;
        for (int f = 0; f < forests; ++f)
        {
            std::vector<int> perm(static_cast<std::size_t>(n));
            std::iota(perm.begin(), perm.end(), 0);
            shuffle(perm, rng);
            for (int i = 1; i < n; ++i)
            {
                // Attach perm[i] to an earlier vertex, skipping with prob 1/8 to get forests.
                if (rng.uniform_below(8) == 0)
                    continue;
                int a = perm[static_cast<std::size_t>(i)];
                int b = perm[rng.uniform_below(static_cast<std::uint64_t>(i))];
                if (a > b)
                    std::swap(a, b);
                if (seen.insert({a, b}).second)
                    tagged.push_back({{a, b}, f});
            }
        }
        std::vector<Edge> es;
        for (const auto& t : tagged)
            es.push_back(t.first);
        CertifiedGraph out{build_graph(static_cast<std::size_t>(n), es), forests, {}};
        std::sort(tagged.begin(), tagged.end());
        for (const auto& t : tagged)
            out.forest_of_edge.push_back(t.second);
        return out;
    }

    /// m hyperedges with sizes uniform in [min(2, rank), rank] over n vertices.
    inline Hypergraph random_hypergraph(int n, std::size_t m, int rank, std::uint64_t seed)
    {
        if (n < 1 || rank < 1 || rank > n)
            throw GeneratorError("random_hypergraph: infeasible rank");
        Rng rng(stream_seed(seed, 0x4e9));
        const int lo = std::min(2, rank);
        std::vector<std::vector<int>> es;
        for (std::size_t e = 0; e < m; ++e)
        {
            const int size = lo + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(rank - lo + 1)));
            std::set<int> s;
            while (static_cast<int>(s.size()) < size)
                s.insert(static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n))));
            es.emplace_back(s.begin(), s.end());
        }
        return Hypergraph(n, std::move(es));
    }

    /// Random hypergraph whose vertex degrees never exceed max_deg. Edges that cannot be
    /// placed within `attempts` proposals are dropped.
    inline Hypergraph random_hypergraph_bounded(int n, std::size_t m, int rank, int max_deg, std::uint64_t seed)
    {
        if (n < 1 || rank < 1 || rank > n || max_deg < 1)
            throw GeneratorError("random_hypergraph_bounded: infeasible parameters");
        Rng rng(stream_seed(seed, 0x4ea));
        const int lo = std::min(2, rank);
        std::vector<int> deg(static_cast<std::size_t>(n), 0);
        std::vector<std::vector<int>> es;
        for (std::size_t e = 0; e < m; ++e)
        {
            const int size = lo + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(rank - lo + 1)));
            for (int attempt = 0; attempt < 64; ++attempt)
            {
                std::set<int> s;
                int guard = 0;
                while (static_cast<int>(s.size()) < size && guard++ < 16 * size)
                {
                    const int v = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
                    if (deg[static_cast<std::size_t>(v)] < max_deg)
                        s.insert(v);
                }
                if (static_cast<int>(s.size()) == size)
                {
                    for (int v : s)
                        ++deg[static_cast<std::size_t>(v)];
                    es.emplace_back(s.begin(), s.end());
                    break;
                }
            }
        }
        return Hypergraph(n, std::move(es));
    }

    /// Every vertex has degree exactly `degree`: `degree` rounds, each a random partition
    /// of a shuffled vertex list into blocks of size `rank`. Requires rank | n.
    inline Hypergraph random_regular_hypergraph(int n, int rank, int degree, std::uint64_t seed)
    {
        if (n < 1 || rank < 1 || n % rank != 0 || degree < 0)
            throw GeneratorError("random_regular_hypergraph: rank must divide n");
        Rng rng(stream_seed(seed, 0x4eb));
        std::vector<std::vector<int>> es;
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int round = 0; round < degree; ++round)
        {
            shuffle(perm, rng);
            for (int b = 0; b < n; b += rank)
                es.emplace_back(perm.begin() + b, perm.begin() + b + rank);
        }
        return Hypergraph(n, std::move(es));
    }

} // namespace dlocal::gen
