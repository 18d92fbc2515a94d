#pragma once

#include "dlocal/derandomize.hpp"
#include "dlocal/generators.hpp"
#include "dlocal/graph.hpp"
#include "dlocal/hypergraph.hpp"
#include "dlocal/hypergraph_matching.hpp"
#include "dlocal/lll.hpp"
#include "dlocal/local.hpp"
#include "dlocal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dlocal::apps
{
    /// Index of each edge of g.edges(), looked up by its (min, max) endpoint pair.
    class EdgeIndex
    {
    public:
        explicit EdgeIndex(const Graph& g) : edges_(g.edges())
        {
            for (std::size_t e = 0; e < edges_.size(); ++e)
                index_[edges_[e]] = static_cast<int>(e);
        }

        const std::vector<Edge>& edges() const noexcept { return edges_; }
        int of(int u, int v) const { return index_.at(u < v ? Edge{u, v} : Edge{v, u}); }

    private:
        std::vector<Edge> edges_;
        std::map<Edge, int> index_;
    };

    // ---------------------------------------------------------------- list edge coloring

    struct EdgeColoring
    {
        std::vector<int> color; // aligned with g.edges(); -1 uncolored
        std::vector<std::vector<int>> palettes;
        std::size_t hyperedges = 0;
    };

    struct EdgeColoringReport
    {
        std::optional<int> uncolored;
        std::optional<int> off_palette;
        std::optional<std::pair<int, int>> conflict; // adjacent edges sharing a color

        bool pass() const { return !uncolored && !off_palette && !conflict; }
    };

    inline EdgeColoringReport validate_list_edge_coloring(const Graph& g, const EdgeColoring& c)
    {
        EdgeColoringReport r;
        const auto es = g.edges();
        if (c.color.size() != es.size() || c.palettes.size() != es.size())
            throw PreconditionError("validate_list_edge_coloring: size mismatch");
        std::vector<std::map<int, int>> at(static_cast<std::size_t>(g.n()));
        for (std::size_t e = 0; e < es.size(); ++e)
        {
            const int col = c.color[e];
            if (col < 0 && !r.uncolored)
                r.uncolored = static_cast<int>(e);
            if (col < 0)
                continue;
            const auto& pal = c.palettes[e];
            if (std::find(pal.begin(), pal.end(), col) == pal.end() && !r.off_palette)
                r.off_palette = static_cast<int>(e);
            for (int x : {es[e].first, es[e].second})
            {
                auto [it, fresh] = at[static_cast<std::size_t>(x)].emplace(col, static_cast<int>(e));
                if (!fresh && !r.conflict)
                    r.conflict = std::pair{it->second, static_cast<int>(e)};
            }
        }
        return r;
    }

    /// Per-edge random palettes of size 2 Delta - 1 + extra drawn from {0, ..., universe - 1}.
    inline std::vector<std::vector<int>> random_palettes(const Graph& g, int extra, int universe, std::uint64_t seed)
    {
        const int size = std::max(1, 2 * g.max_degree() - 1) + extra;
        if (universe < size)
            throw GeneratorError("random_palettes: universe smaller than palette size");
        std::vector<std::vector<int>> out;
        Rng rng(stream_seed(seed, 0xed9e));
        for (std::size_t e = 0; e < g.edges().size(); ++e)
        {
            std::vector<int> all(static_cast<std::size_t>(universe));
            std::iota(all.begin(), all.end(), 0);
            for (int i = 0; i < size; ++i)
                std::swap(all[static_cast<std::size_t>(i)],
                          all[static_cast<std::size_t>(i) + rng.uniform_below(static_cast<std::uint64_t>(universe - i))]);
            all.resize(static_cast<std::size_t>(size));
            std::sort(all.begin(), all.end());
            out.push_back(std::move(all));
        }
        return out;
    }

    /// Rank-3 reduction: hypergraph vertices are the graph edges and the (node, color) slots;
    /// each edge e = {u, v} and color c of its palette gives the hyperedge {e, (u,c), (v,c)}.
    /// A maximal matching colors every edge: an unmatched e would need each of its >= 2 Delta - 1
    /// colors blocked at u or v, but the <= 2 (Delta - 1) colored neighbors block one color each.
    inline EdgeColoring list_edge_coloring(const Graph& g, std::vector<std::vector<int>> palettes,
                                           const MaximalMatchingOptions& opt = {})
    {
        const auto es = g.edges();
        if (palettes.size() != es.size())
            throw PreconditionError("list_edge_coloring: one palette per edge required");
        const std::size_t need = static_cast<std::size_t>(std::max(1, 2 * g.max_degree() - 1));
        for (std::size_t e = 0; e < es.size(); ++e)
        {
            auto& pal = palettes[e];
            std::sort(pal.begin(), pal.end());
            pal.erase(std::unique(pal.begin(), pal.end()), pal.end());
            if (pal.size() < need)
                throw PreconditionError("list_edge_coloring: edge " + std::to_string(e) + " has " + std::to_string(pal.size()) +
                                        " distinct colors, needs " + std::to_string(need));
        }
        const int m = static_cast<int>(es.size());
        std::map<std::pair<int, int>, int> slot;
        auto slot_of = [&](int node, int col) {
            auto [it, fresh] = slot.emplace(std::pair{node, col}, 0);
            if (fresh)
                it->second = m + static_cast<int>(slot.size()) - 1;
            return it->second;
        };
        std::vector<std::vector<int>> hedges;
        std::vector<std::pair<int, int>> meaning; // (edge, color)
        for (int e = 0; e < m; ++e)
            for (int c : palettes[static_cast<std::size_t>(e)])
            {
                hedges.push_back({e, slot_of(es[static_cast<std::size_t>(e)].first, c), slot_of(es[static_cast<std::size_t>(e)].second, c)});
                meaning.emplace_back(e, c);
            }
        const Hypergraph h(m + static_cast<int>(slot.size()), std::move(hedges));
        const auto mm = hypergraph_maximal_matching(h, opt);
        EdgeColoring out;
        out.color.assign(es.size(), -1);
        out.hyperedges = h.m();
        for (int he : mm.matching)
            out.color[static_cast<std::size_t>(meaning[static_cast<std::size_t>(he)].first)] = meaning[static_cast<std::size_t>(he)].second;
        out.palettes = std::move(palettes);
        const auto rep = validate_list_edge_coloring(g, out);
        if (rep.uncolored)
            throw PostconditionViolation("list_edge_coloring: edge " + std::to_string(*rep.uncolored) + " left uncolored");
        if (!rep.pass())
            throw PostconditionViolation("list_edge_coloring: output is not a proper list coloring");
        return out;
    }

    // ---------------------------------------------------------------- approximate maximum matching

    struct GraphMatching
    {
        std::vector<int> mate; // -1 when free

        int size() const
        {
            return static_cast<int>(std::count_if(mate.begin(), mate.end(), [](int x) { return x >= 0; })) / 2;
        }
    };

    inline bool is_graph_matching(const Graph& g, const GraphMatching& m)
    {
        if (m.mate.size() != static_cast<std::size_t>(g.n()))
            return false;
        for (int v = 0; v < g.n(); ++v)
        {
            const int u = m.mate[static_cast<std::size_t>(v)];
            if (u < 0)
                continue;
            if (u >= g.n() || m.mate[static_cast<std::size_t>(u)] != v || !g.has_edge(u, v))
                return false;
        }
        return true;
    }

    /// All augmenting paths with exactly `len` edges (odd), one per vertex set.
    inline std::vector<std::vector<int>> augmenting_paths(const Graph& g, const GraphMatching& m, int len,
                                                          std::size_t cap = 2'000'000)
    {
        std::vector<std::vector<int>> out;
        if (len % 2 == 0 || len < 1)
            return out;
        std::set<std::vector<int>> seen;
        std::vector<int> path;
        std::vector<char> on(static_cast<std::size_t>(g.n()), 0);
        std::function<void()> extend = [&] {
            const int v = path.back();
            const int depth = static_cast<int>(path.size()) - 1; // edges so far
            if (depth == len)
            {
                if (m.mate[static_cast<std::size_t>(v)] >= 0 || path.front() > v)
                    return;
                auto key = path;
                std::sort(key.begin(), key.end());
                if (seen.insert(std::move(key)).second)
                {
                    out.push_back(path);
                    if (out.size() > cap)
                        throw CapacityError("augmenting_paths: more than " + std::to_string(cap) + " paths of length " +
                                            std::to_string(len));
                }
                return;
            }
            if (depth % 2 == 1)
            {
                // next edge is the matching edge
                const int w = m.mate[static_cast<std::size_t>(v)];
                if (w < 0 || on[static_cast<std::size_t>(w)])
                    return;
                on[static_cast<std::size_t>(w)] = 1;
                path.push_back(w);
                extend();
                path.pop_back();
                on[static_cast<std::size_t>(w)] = 0;
                return;
            }
            for (int w : g.neighbors(v))
            {
                if (on[static_cast<std::size_t>(w)] || m.mate[static_cast<std::size_t>(v)] == w)
                    continue;
                // interior vertices are matched; only the last may be free
                if (depth + 1 < len && m.mate[static_cast<std::size_t>(w)] < 0)
                    continue;
                on[static_cast<std::size_t>(w)] = 1;
                path.push_back(w);
                extend();
                path.pop_back();
                on[static_cast<std::size_t>(w)] = 0;
            }
        };
        for (int s = 0; s < g.n(); ++s)
        {
            if (m.mate[static_cast<std::size_t>(s)] >= 0)
                continue;
            path = {s};
            on[static_cast<std::size_t>(s)] = 1;
            extend();
            on[static_cast<std::size_t>(s)] = 0;
        }
        return out;
    }

    struct ApproxMatching
    {
        GraphMatching matching;
        int max_length = 0;                  // longest augmenting length processed
        std::vector<std::size_t> augmented;  // paths augmented per length 1..max_length
        double guaranteed_ratio = 0;         // |M| >= ratio * nu
    };

    /// Rounds l = 1 .. ceil(2/eps): a maximal vertex-disjoint set of augmenting paths with l
    /// edges, found as a maximal matching of the hypergraph whose hyperedges are their vertex
    /// sets, is augmented. Afterwards no augmenting path of length <= l remains.
    inline ApproxMatching approx_maximum_matching(const Graph& g, double eps, std::optional<GraphMatching> start = std::nullopt,
                                                  const MaximalMatchingOptions& opt = {})
    {
        if (!(eps > 0 && eps <= 1))
            throw PreconditionError("approx_maximum_matching: eps must lie in (0, 1]");
        ApproxMatching out;
        out.matching = start ? *start : GraphMatching{std::vector<int>(static_cast<std::size_t>(g.n()), -1)};
        if (!is_graph_matching(g, out.matching))
            throw PreconditionError("approx_maximum_matching: start is not a matching");
        out.max_length = static_cast<int>(std::ceil(2.0 / eps - 1e-12));
        auto& mate = out.matching.mate;
        for (int len = 1; len <= out.max_length; ++len)
        {
            const auto paths = augmenting_paths(g, out.matching, len);
            if (paths.empty())
            {
                out.augmented.push_back(0);
                continue;
            }
            const Hypergraph h(g.n(), paths);
            const auto mm = hypergraph_maximal_matching(h, opt);
            for (int e : mm.matching)
            {
                const auto& p = paths[static_cast<std::size_t>(e)];
                for (std::size_t i = 0; i + 1 < p.size(); i += 2)
                {
                    mate[static_cast<std::size_t>(p[i])] = p[i + 1];
                    mate[static_cast<std::size_t>(p[i + 1])] = p[i];
                }
            }
            out.augmented.push_back(mm.matching.size());
        }
        if (!is_graph_matching(g, out.matching))
            throw PostconditionViolation("approx_maximum_matching: augmentation broke the matching");
        int last_odd = out.max_length % 2 == 1 ? out.max_length : out.max_length - 1;
        for (int len = 1; len <= last_odd; len += 2)
            if (!augmenting_paths(g, out.matching, len).empty())
                throw PostconditionViolation("approx_maximum_matching: augmenting path of length " + std::to_string(len) + " remains");
        // Shortest augmenting path has >= 2k+1 edges, so |M| >= k/(k+1) nu.
        const double k = (last_odd + 1) / 2.0;
        out.guaranteed_ratio = k / (k + 1);
        return out;
    }

    // ---------------------------------------------------------------- orientations

    struct Orientation
    {
        std::vector<Edge> arcs;       // (tail, head), aligned with g.edges()
        std::vector<char> half_edge;  // edge handled as a half-edge of its tail

        std::vector<int> out_degrees(int n) const
        {
            std::vector<int> d(static_cast<std::size_t>(n), 0);
            for (const auto& [t, h] : arcs)
                ++d[static_cast<std::size_t>(t)];
            return d;
        }

        int max_out_degree(int n) const
        {
            const auto d = out_degrees(n);
            return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
        }
    };

    /// Every edge oriented exactly once, as one of its two directions.
    inline bool is_orientation_of(const Graph& g, const Orientation& o)
    {
        const auto es = g.edges();
        if (o.arcs.size() != es.size())
            return false;
        for (std::size_t e = 0; e < es.size(); ++e)
        {
            const auto& [t, h] = o.arcs[e];
            if (!((t == es[e].first && h == es[e].second) || (t == es[e].second && h == es[e].first)))
                return false;
        }
        return true;
    }

    inline Orientation orient_by_index(const Graph& g)
    {
        Orientation o;
        o.arcs = g.edges();
        o.half_edge.assign(o.arcs.size(), 0);
        return o;
    }

    struct OutdegreeOrientation
    {
        Orientation orientation;
        int budget = 0;            // D
        int iterations = 0;
        std::vector<std::size_t> reversed; // paths reversed per iteration
    };

    /// ceil(a log2 n / eps) with a = 4: the iteration guard.
    inline int orientation_iteration_cap(int n, double eps)
    {
        return static_cast<int>(std::ceil(4.0 * std::max(1.0, std::log2(std::max(n, 2))) / eps));
    }

    /// Repeatedly reverses a maximal edge-disjoint set of augmenting paths (directed paths from an
    /// overloaded node to an underloaded one) of length 3 + i in the source/sink graph. The source
    /// and sink edges are explicit hypergraph vertices, so a node starts (ends) at most
    /// outdeg - D (D - outdeg) selected paths.
    inline OutdegreeOrientation low_outdegree_orientation(const Graph& g, int lambda, double eps,
                                                          const MaximalMatchingOptions& opt = {},
                                                          std::size_t path_cap = 2'000'000)
    {
        if (lambda < 1)
            throw PreconditionError("low_outdegree_orientation: arboricity bound must be >= 1");
        if (!(eps > 0))
            throw PreconditionError("low_outdegree_orientation: eps must be positive");
        OutdegreeOrientation out;
        out.budget = static_cast<int>(std::ceil(lambda * (1 + eps) - 1e-9));
        const int D = out.budget;
        out.orientation = orient_by_index(g);
        auto& arcs = out.orientation.arcs;
        const int m = static_cast<int>(arcs.size());
        const EdgeIndex idx(g);
        const int cap = orientation_iteration_cap(g.n(), eps);

        for (int i = 0;; ++i)
        {
            auto deg = out.orientation.out_degrees(g.n());
            if (deg.empty() || *std::max_element(deg.begin(), deg.end()) <= D)
                break;
            if (i >= cap)
                throw BudgetExceeded("low_outdegree_orientation: " + std::to_string(cap) + " iterations, max out-degree still " +
                                     std::to_string(*std::max_element(deg.begin(), deg.end())) + " > " + std::to_string(D));
            out.iterations = i + 1;
            const int len = 1 + i; // graph edges on a source-to-sink path of length 3 + i
            std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(g.n()));
            for (int e = 0; e < m; ++e)
                out_arcs[static_cast<std::size_t>(arcs[static_cast<std::size_t>(e)].first)].push_back(e);

            // Slot vertices: edges 0..m-1, then source copies, then sink copies.
            std::vector<int> src_first(static_cast<std::size_t>(g.n()), 0), sink_first(static_cast<std::size_t>(g.n()), 0);
            int next = m;
            for (int v = 0; v < g.n(); ++v)
            {
                src_first[static_cast<std::size_t>(v)] = next;
                next += std::max(0, deg[static_cast<std::size_t>(v)] - D);
            }
            for (int v = 0; v < g.n(); ++v)
            {
                sink_first[static_cast<std::size_t>(v)] = next;
                next += std::max(0, D - deg[static_cast<std::size_t>(v)]);
            }

            std::vector<std::vector<int>> hedges;
            std::vector<std::vector<int>> path_of; // graph edges of each hyperedge's path
            std::vector<int> trail;
            std::vector<char> on(static_cast<std::size_t>(g.n()), 0);
            std::function<void(int, int)> walk = [&](int start, int v) {
                if (static_cast<int>(trail.size()) == len)
                {
                    const int under = D - deg[static_cast<std::size_t>(v)];
                    if (under <= 0)
                        return;
                    for (int a = 0; a < deg[static_cast<std::size_t>(start)] - D; ++a)
                        for (int b = 0; b < under; ++b)
                        {
                            auto he = trail;
                            he.push_back(src_first[static_cast<std::size_t>(start)] + a);
                            he.push_back(sink_first[static_cast<std::size_t>(v)] + b);
                            hedges.push_back(std::move(he));
                            path_of.push_back(trail);
                            if (hedges.size() > path_cap)
                                throw CapacityError("low_outdegree_orientation: more than " + std::to_string(path_cap) +
                                                    " augmenting paths of length " + std::to_string(len + 2));
                        }
                    return;
                }
                for (int e : out_arcs[static_cast<std::size_t>(v)])
                {
                    const int w = arcs[static_cast<std::size_t>(e)].second;
                    if (on[static_cast<std::size_t>(w)])
                        continue;
                    on[static_cast<std::size_t>(w)] = 1;
                    trail.push_back(e);
                    walk(start, w);
                    trail.pop_back();
                    on[static_cast<std::size_t>(w)] = 0;
                }
            };
            for (int v = 0; v < g.n(); ++v)
                if (deg[static_cast<std::size_t>(v)] > D)
                {
                    on[static_cast<std::size_t>(v)] = 1;
                    walk(v, v);
                    on[static_cast<std::size_t>(v)] = 0;
                }
            if (hedges.empty())
            {
                out.reversed.push_back(0);
                continue;
            }
            const Hypergraph h(next, std::move(hedges));
            const auto mm = hypergraph_maximal_matching(h, opt);
            for (int he : mm.matching)
                for (int e : path_of[static_cast<std::size_t>(he)])
                    std::swap(arcs[static_cast<std::size_t>(e)].first, arcs[static_cast<std::size_t>(e)].second);
            out.reversed.push_back(mm.matching.size());
        }
        if (!is_orientation_of(g, out.orientation) || out.orientation.max_out_degree(g.n()) > D)
            throw PostconditionViolation("low_outdegree_orientation: final out-degree above budget");
        (void)idx;
        return out;
    }

    // ---------------------------------------------------------------- defective coloring

    struct VertexColoring
    {
        std::vector<int> color;
        int k = 0;
        int h = 0;
    };

    /// Max number of same-colored neighbors.
    inline int max_defect(const Graph& g, std::span<const int> color)
    {
        int worst = 0;
        for (int v = 0; v < g.n(); ++v)
        {
            int same = 0;
            for (int w : g.neighbors(v))
                same += color[static_cast<std::size_t>(w)] == color[static_cast<std::size_t>(v)] ? 1 : 0;
            worst = std::max(worst, same);
        }
        return worst;
    }

    inline bool is_h_defective(const Graph& g, std::span<const int> color, int h) { return max_defect(g, color) <= h; }

    inline int floor_pow2(double x)
    {
        int p = 1;
        while (2.0 * p <= x)
            p *= 2;
        return p;
    }

    inline int ceil_pow2(double x)
    {
        int p = 1;
        while (p < x)
            p *= 2;
        return p;
    }

    namespace detail
    {
        inline BigInt binom(int n, int k)
        {
            if (k < 0 || k > n)
                return 0;
            BigInt r = 1;
            for (int i = 1; i <= k; ++i)
                r = r * (n - k + i) / i;
            return r;
        }

        /// Pr(count > threshold in some class) for s free uniform labels over 2^bits classes,
        /// given the fixed counts.
        inline Dyadic overflow_probability(const std::vector<int>& fixed_counts, int s, double threshold, int bits)
        {
            const int k = 1 << bits;
            std::vector<int> room(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i)
            {
                const double r = std::floor(threshold) - fixed_counts[static_cast<std::size_t>(i)];
                if (r < 0)
                    return Dyadic(1);
                room[static_cast<std::size_t>(i)] = static_cast<int>(std::min<double>(r, s));
            }
            // ways[r] = labelled assignments of r free items to the remaining classes within room
            std::vector<BigInt> ways(static_cast<std::size_t>(s) + 1, 0);
            ways[0] = 1;
            for (int i = 0; i < k; ++i)
            {
                std::vector<BigInt> nxt(static_cast<std::size_t>(s) + 1, 0);
                for (int r = 0; r <= s; ++r)
                    for (int j = 0; j <= std::min(r, room[static_cast<std::size_t>(i)]); ++j)
                        nxt[static_cast<std::size_t>(r)] += binom(r, j) * ways[static_cast<std::size_t>(r - j)];
                ways = std::move(nxt);
            }
            return Dyadic(1) - Dyadic(ways[static_cast<std::size_t>(s)], static_cast<unsigned>(bits * s));
        }

        /// Pr(fixed + Bin(s, 2^-bits) > h).
        inline Dyadic same_color_tail(int fixed, int s, int h, int bits)
        {
            const int t = h + 1 - fixed;
            if (t <= 0)
                return Dyadic(1);
            BigInt num = 0;
            const BigInt km1 = (BigInt(1) << bits) - 1;
            for (int j = t; j <= s; ++j)
            {
                BigInt term = binom(s, j);
                for (int q = 0; q < s - j; ++q)
                    term *= km1;
                num += term;
            }
            return Dyadic(num, static_cast<unsigned>(bits * s));
        }

        inline lll::Variable uniform_variable(long long id, int bits)
        {
            return lll::Variable{id, std::vector<Dyadic>(static_cast<std::size_t>(1) << bits, Dyadic::pow2_inverse(static_cast<unsigned>(bits)))};
        }

        inline int log2_exact(int k)
        {
            int b = 0;
            while ((1 << b) < k)
                ++b;
            return b;
        }
    } // namespace detail

    /// Class-assignment instance: variable v = class of node v (2^bits classes); event v =
    /// "more than threshold neighbors of v in one class".
    inline lll::Instance degree_reduce_instance(const Graph& g, int classes, double threshold)
    {
        const int bits = detail::log2_exact(classes);
        std::vector<lll::Variable> vars;
        for (int v = 0; v < g.n(); ++v)
            vars.push_back(detail::uniform_variable(v, bits));
        std::vector<lll::Event> evs;
        for (int v = 0; v < g.n(); ++v)
        {
            lll::Event e;
            e.id = v;
            e.scope.assign(g.neighbors(v).begin(), g.neighbors(v).end());
            e.holds = [classes, threshold](std::span<const int> x) {
                std::vector<int> cnt(static_cast<std::size_t>(classes), 0);
                for (int c : x)
                    if (++cnt[static_cast<std::size_t>(c)] > threshold)
                        return true;
                return false;
            };
            e.evaluator = [classes, threshold, bits](std::span<const int> x) {
                std::vector<int> cnt(static_cast<std::size_t>(classes), 0);
                int s = 0;
                for (int c : x)
                {
                    if (c == lll::kStar)
                        ++s;
                    else
                        ++cnt[static_cast<std::size_t>(c)];
                }
                return detail::overflow_probability(cnt, s, threshold, bits);
            };
            evs.push_back(std::move(e));
        }
        return lll::Instance(std::move(vars), std::move(evs));
    }

    /// Color instance: variable v = color of v (2^bits colors); event v = "more than h
    /// neighbors share v's color".
    inline lll::Instance defect_instance(const Graph& g, int colors, int h)
    {
        const int bits = detail::log2_exact(colors);
        std::vector<lll::Variable> vars;
        for (int v = 0; v < g.n(); ++v)
            vars.push_back(detail::uniform_variable(v, bits));
        std::vector<lll::Event> evs;
        for (int v = 0; v < g.n(); ++v)
        {
            lll::Event e;
            e.id = v;
            e.scope.assign(g.neighbors(v).begin(), g.neighbors(v).end());
            const auto self = static_cast<std::size_t>(std::lower_bound(e.scope.begin(), e.scope.end(), v) - e.scope.begin());
            e.scope.insert(e.scope.begin() + static_cast<std::ptrdiff_t>(self), v);
            e.holds = [self, h](std::span<const int> x) {
                int same = 0;
                for (std::size_t i = 0; i < x.size(); ++i)
                    same += (i != self && x[i] == x[self]) ? 1 : 0;
                return same > h;
            };
            e.evaluator = [self, h, bits, colors](std::span<const int> x) {
                int s = 0;
                std::vector<int> cnt(static_cast<std::size_t>(colors), 0);
                for (std::size_t i = 0; i < x.size(); ++i)
                {
                    if (i == self)
                        continue;
                    if (x[i] == lll::kStar)
                        ++s;
                    else
                        ++cnt[static_cast<std::size_t>(x[i])];
                }
                if (x[self] != lll::kStar)
                    return detail::same_color_tail(cnt[static_cast<std::size_t>(x[self])], s, h, bits);
                Dyadic total;
                for (int c = 0; c < colors; ++c)
                    total += detail::same_color_tail(cnt[static_cast<std::size_t>(c)], s, h, bits);
                return total * Dyadic::pow2_inverse(static_cast<unsigned>(bits));
            };
            evs.push_back(std::move(e));
        }
        return lll::Instance(std::move(vars), std::move(evs));
    }

    /// Documented constant: the pipeline returns k <= kDefectiveConstant * Delta / h.
    inline constexpr double kDefectiveConstant = 8.0;

    struct DefectiveOptions
    {
        double K = 100;          // degree-reduction overflow multiplier
        double final_factor = 1; // final stage uses ceil_pow2(final_factor * Delta_2 / h) colors
        std::uint64_t seed = 1;
        lll::DangerOptions danger{};
        lll::ShatterOptions shatter{};
        std::size_t mt_max_steps = 200'000;
    };

    struct DefectiveStage
    {
        std::string name;
        int classes = 1;
        int degree_in = 0;   // max degree entering the stage
        int degree_out = 0;  // max degree inside a class afterwards
        bool skipped = false; // Delta / log Delta < 2
        bool vacuous = false; // overflow impossible: every sample avoids all events
        std::size_t residual_events = 0;
        int retries = 0;
    };

    struct DefectiveColoring
    {
        VertexColoring coloring;
        int max_degree = 0;
        std::vector<DefectiveStage> stages;
        double ratio = 0; // k / (Delta / h)
    };

    namespace detail
    {
        inline int class_max_degree(const Graph& g, std::span<const int> cls)
        {
            int worst = 0;
            for (int v = 0; v < g.n(); ++v)
            {
                int same = 0;
                for (int w : g.neighbors(v))
                    same += cls[static_cast<std::size_t>(w)] == cls[static_cast<std::size_t>(v)] ? 1 : 0;
                worst = std::max(worst, same);
            }
            return worst;
        }

        /// One class-assignment stage on g with the given class count and overflow threshold,
        /// solved by dangerous-event resampling plus residual shattering.
        inline std::vector<int> reduce_classes(const Graph& g, int classes, double threshold, const DefectiveOptions& opt,
                                               std::uint64_t seed, DefectiveStage& st)
        {
            const auto inst = degree_reduce_instance(g, classes, threshold);
            if (lll::max_probability(inst).is_zero())
            {
                st.vacuous = true;
                return lll::sample(inst, seed);
            }
            const auto a2 = lll::algorithm2_dangerous(inst, seed, opt.danger);
            st.residual_events += a2.residual.size();
            auto so = opt.shatter;
            so.seed = seed;
            const auto sol = lll::shattering_solve(inst, a2.residual, a2.partial, so);
            if (!sol.solved)
                throw PostconditionViolation("defective_coloring: class-assignment residual unsolved");
            return sol.assignment;
        }

        /// Splits g by `cls`, runs `fn(subgraph, nodes, index)` on each class, returns per-node labels.
        template <class Fn>
        std::vector<int> per_class(const Graph& g, std::span<const int> cls, int classes, Fn fn)
        {
            std::vector<std::vector<int>> members(static_cast<std::size_t>(classes));
            for (int v = 0; v < g.n(); ++v)
                members[static_cast<std::size_t>(cls[static_cast<std::size_t>(v)])].push_back(v);
            std::vector<int> out(static_cast<std::size_t>(g.n()), 0);
            for (int c = 0; c < classes; ++c)
            {
                const auto& nodes = members[static_cast<std::size_t>(c)];
                if (nodes.empty())
                    continue;
                const Graph sub = induced_subgraph(g, nodes);
                const auto lab = fn(sub, c);
                for (std::size_t i = 0; i < nodes.size(); ++i)
                    out[static_cast<std::size_t>(nodes[i])] = lab[i];
            }
            return out;
        }
    } // namespace detail

    /// Degree reduction twice, then a final resampling stage per class; stages are combined as
    /// color = inner_count * outer + inner. Class counts are powers of two so every draw is a
    /// whole number of fair bits; logarithms are base 2.
    inline DefectiveColoring defective_coloring(const Graph& g, int h, const DefectiveOptions& opt = {})
    {
        const int delta = g.max_degree();
        if (h < 1 || h > std::max(delta, 1))
            throw PreconditionError("defective_coloring: need 1 <= h <= Delta");
        DefectiveColoring out;
        out.max_degree = delta;
        out.coloring.h = h;
        std::vector<int> color(static_cast<std::size_t>(g.n()), 0);
        int k = 1;
        if (h >= delta)
        {
            out.stages.push_back({"trivial", 1, delta, delta, true, false, 0, 0});
        }
        else
        {
            int cur_delta = delta;
            for (int stage = 0; stage < 2; ++stage)
            {
                DefectiveStage st;
                st.name = "degree-reduce-" + std::to_string(stage + 1);
                st.degree_in = cur_delta;
                const double lg = cur_delta >= 2 ? std::log2(cur_delta) : 1.0;
                if (cur_delta < 2 || cur_delta / lg < 2 || cur_delta <= h)
                {
                    st.skipped = true;
                    st.degree_out = cur_delta;
                    out.stages.push_back(st);
                    continue;
                }
                st.classes = floor_pow2(cur_delta / lg);
                const double threshold = opt.K * lg;
                std::uint64_t sub_seed = stream_seed(opt.seed, static_cast<std::uint64_t>(stage));
                auto inner = detail::per_class(g, color, k, [&](const Graph& sub, int c) {
                    return detail::reduce_classes(sub, st.classes, threshold, opt, stream_seed(sub_seed, static_cast<std::uint64_t>(c)), st);
                });
                for (int v = 0; v < g.n(); ++v)
                    color[static_cast<std::size_t>(v)] = st.classes * color[static_cast<std::size_t>(v)] + inner[static_cast<std::size_t>(v)];
                k *= st.classes;
                st.degree_out = detail::class_max_degree(g, color);
                cur_delta = st.degree_out;
                out.stages.push_back(st);
            }

            DefectiveStage fin;
            fin.name = "final";
            fin.degree_in = cur_delta;
            if (h >= cur_delta)
            {
                fin.skipped = true;
            }
            else
            {
                fin.classes = std::max(2, ceil_pow2(opt.final_factor * cur_delta / h));
                for (;; ++fin.retries)
                {
                    bool ok = true;
                    const int colors = fin.classes;
                    auto inner = detail::per_class(g, color, k, [&](const Graph& sub, int c) {
                        const auto inst = defect_instance(sub, colors, h);
                        lll::MTOptions mo{lll::MTMode::ParallelRounds, opt.mt_max_steps};
                        const auto r = lll::moser_tardos(inst, stream_seed(opt.seed, 7, static_cast<std::uint64_t>(c) + 1000 * static_cast<std::uint64_t>(fin.retries)), mo);
                        ok = ok && r.solved;
                        return r.assignment;
                    });
                    if (ok)
                    {
                        for (int v = 0; v < g.n(); ++v)
                            color[static_cast<std::size_t>(v)] = colors * color[static_cast<std::size_t>(v)] + inner[static_cast<std::size_t>(v)];
                        k *= colors;
                        break;
                    }
                    if (fin.retries >= 8)
                        throw BudgetExceeded("defective_coloring: final stage did not converge");
                    fin.classes *= 2;
                }
            }
            fin.degree_out = detail::class_max_degree(g, color);
            out.stages.push_back(fin);
        }
        out.coloring.color = std::move(color);
        out.coloring.k = k;
        if (!is_h_defective(g, out.coloring.color, h))
            throw PostconditionViolation("defective_coloring: output is not " + std::to_string(h) + "-defective");
        out.ratio = k / (std::max(delta, 1) / static_cast<double>(h));
        return out;
    }

    // ---------------------------------------------------------------- k-SAT

    struct KsatOptions
    {
        std::uint64_t seed = 1;
        lll::DangerOptions danger{};
        lll::ShatterOptions shatter{};
    };

    struct KsatReport
    {
        int width = 0;
        int d = 0;
        double fragility = 0;            // (3/4)^k
        double residual_event_bound = 0; // e F d^4
        bool fragility_criterion = false; // d <= e^-10 (4/3)^(k/12)
        bool classic_criterion = false;   // e p d <= 1
        std::optional<lll::Assignment> assignment;
        std::size_t dangerous = 0;
        std::size_t residual = 0;
        std::vector<int> component_sizes;
        std::string failure;
    };

    inline KsatReport ksat_solve(const lll::Instance& phi, const KsatOptions& opt = {})
    {
        if (!phi.is_cnf())
            throw PreconditionError("ksat_solve: formula has non-clause events");
        KsatReport r;
        for (const auto& e : phi.events())
        {
            const int w = static_cast<int>(e.clause.size());
            if (r.width != 0 && w != r.width)
                throw PreconditionError("ksat_solve: clauses of different widths");
            r.width = w;
        }
        r.d = phi.d();
        r.fragility = std::pow(0.75, r.width);
        r.residual_event_bound = std::numbers::e * r.fragility * std::pow(r.d, 4);
        r.fragility_criterion = r.d <= std::exp(-10.0) * std::pow(4.0 / 3.0, r.width / 12.0);
        r.classic_criterion = phi.event_count() == 0 || std::numbers::e * std::ldexp(1.0, -r.width) * r.d <= 1;
        const auto a2 = lll::algorithm2_dangerous(phi, opt.seed, opt.danger);
        r.dangerous = a2.dangerous.size();
        r.residual = a2.residual.size();
        r.component_sizes = lll::residual_component_sizes(phi, a2.residual);
        try
        {
            auto so = opt.shatter;
            so.seed = opt.seed;
            const auto sol = lll::shattering_solve(phi, a2.residual, a2.partial, so);
            if (sol.solved && lll::satisfies(phi, sol.assignment))
                r.assignment = sol.assignment;
            else
                r.failure = "residual component unsolvable";
        }
        catch (const CapacityError& e)
        {
            r.failure = e.what();
        }
        return r;
    }

    // ---------------------------------------------------------------- sinkless orientation

    enum class NodeType : char
    {
        Good,
        TypeI,
        TypeII,
        TypeIII,
    };

    struct EdgeTape
    {
        bool marked = false;  // both mark bits set: probability 1/4
        bool forward = false; // marked edge points from the smaller to the larger endpoint
    };

    inline std::vector<EdgeTape> sinkless_tapes(const Graph& g, std::uint64_t seed)
    {
        std::vector<EdgeTape> t;
        const auto m = g.edges().size();
        for (std::size_t e = 0; e < m; ++e)
        {
            Rng rng(stream_seed(seed, e, 0x51c));
            const bool a = rng.coin(), b = rng.coin();
            t.push_back({a && b, rng.coin()});
        }
        return t;
    }

    struct SinklessPass1
    {
        std::vector<NodeType> type;
        std::vector<char> marked;   // after unmarking around Type I nodes
        std::vector<Edge> arcs;     // orientation of decided edges; (-1, -1) when left to pass 2
        std::vector<char> half_edge;

        bool bad(int v) const { return type[static_cast<std::size_t>(v)] != NodeType::Good; }
    };

    /// Pass 1 of the two-pass algorithm. A node's type depends on tapes of edges within distance 2.
    inline SinklessPass1 sinkless_pass1(const Graph& g, std::span<const EdgeTape> tapes)
    {
        const auto es = g.edges();
        if (tapes.size() != es.size())
            throw PreconditionError("sinkless_pass1: one tape per edge");
        const EdgeIndex idx(g);
        SinklessPass1 p;
        p.type.assign(static_cast<std::size_t>(g.n()), NodeType::Good);
        auto tail = [&](std::size_t e) { return tapes[e].forward ? es[e].first : es[e].second; };
        for (int v = 0; v < g.n(); ++v)
        {
            int marked = 0;
            for (int w : g.neighbors(v))
                marked += tapes[static_cast<std::size_t>(idx.of(v, w))].marked ? 1 : 0;
            if (2 * marked > g.degree(v))
                p.type[static_cast<std::size_t>(v)] = NodeType::TypeI;
        }
        for (int v = 0; v < g.n(); ++v)
        {
            if (p.type[static_cast<std::size_t>(v)] == NodeType::TypeI)
                continue;
            bool near_one = false, has_out = false;
            for (int w : g.neighbors(v))
            {
                near_one = near_one || p.type[static_cast<std::size_t>(w)] == NodeType::TypeI;
                const auto e = static_cast<std::size_t>(idx.of(v, w));
                has_out = has_out || (tapes[e].marked && tail(e) == v);
            }
            if (near_one)
                p.type[static_cast<std::size_t>(v)] = NodeType::TypeII;
            else if (!has_out)
                p.type[static_cast<std::size_t>(v)] = NodeType::TypeIII;
        }
        p.marked.assign(es.size(), 0);
        p.arcs.assign(es.size(), Edge{-1, -1});
        p.half_edge.assign(es.size(), 0);
        for (std::size_t e = 0; e < es.size(); ++e)
        {
            const auto [u, v] = es[e];
            const bool type_one = p.type[static_cast<std::size_t>(u)] == NodeType::TypeI || p.type[static_cast<std::size_t>(v)] == NodeType::TypeI;
            p.marked[e] = tapes[e].marked && !type_one;
            const bool bu = p.bad(u), bv = p.bad(v);
            if (p.marked[e] && !(bu && bv))
                p.arcs[e] = tapes[e].forward ? Edge{u, v} : Edge{v, u};
            else if (!p.marked[e] && !bu && !bv)
                p.arcs[e] = Edge{u, v};
            else if (!p.marked[e] && bu != bv)
            {
                p.half_edge[e] = 1;
                p.arcs[e] = bu ? Edge{u, v} : Edge{v, u};
            }
            // edges between two bad nodes are left to pass 2
        }
        return p;
    }

    struct SinklessResult
    {
        Orientation orientation;
        std::vector<NodeType> type;
        std::vector<int> bad_component_sizes;
        bool pass2_skipped = false;
        int borrowed = 0; // rootless tree components fixed by reversing a surplus edge
    };

    inline bool is_sinkless(const Graph& g, const Orientation& o)
    {
        if (!is_orientation_of(g, o))
            return false;
        const auto d = o.out_degrees(g.n());
        return std::all_of(d.begin(), d.end(), [](int x) { return x >= 1; });
    }

    /// Pass 2 on each component of bad nodes (all edges between bad nodes): nodes already
    /// owning an outgoing half-edge or fixed edge are roots; otherwise a cycle is oriented
    /// consistently and serves as the root. Every other node points along a BFS tree toward the
    /// roots, so each bad node gets an outgoing edge.
    inline SinklessResult sinkless_orientation(const Graph& g, std::uint64_t seed)
    {
        for (int v = 0; v < g.n(); ++v)
            if (g.degree(v) < 3)
                throw PreconditionError("sinkless_orientation: node " + std::to_string(g.id(v)) + " has degree " +
                                        std::to_string(g.degree(v)) + " < 3");
        const auto tapes = sinkless_tapes(g, seed);
        auto p = sinkless_pass1(g, tapes);
        const auto es = g.edges();
        const EdgeIndex idx(g);
        SinklessResult out;
        out.type = p.type;

        std::vector<int> bad;
        for (int v = 0; v < g.n(); ++v)
            if (p.bad(v))
                bad.push_back(v);
        out.pass2_skipped = bad.empty();
        auto& arcs = p.arcs;
        auto outdeg = [&](int v) {
            int d = 0;
            for (int w : g.neighbors(v))
                d += arcs[static_cast<std::size_t>(idx.of(v, w))].first == v ? 1 : 0;
            return d;
        };
        const auto parts = components(g, bad);
        for (const auto& comp : parts.parts)
        {
            out.bad_component_sizes.push_back(static_cast<int>(comp.size()));
            std::vector<char> done(static_cast<std::size_t>(g.n()), 0);
            std::vector<int> frontier;
            for (int v : comp)
                if (outdeg(v) > 0)
                {
                    done[static_cast<std::size_t>(v)] = 1;
                    frontier.push_back(v);
                }
            auto in_comp = [&](int w) { return parts.label[static_cast<std::size_t>(w)] == parts.label[static_cast<std::size_t>(comp.front())]; };
            if (frontier.empty())
            {
                // Find a cycle by DFS over the component's edges.
                std::vector<int> parent(static_cast<std::size_t>(g.n()), -2);
                std::vector<int> cyc;
                std::function<bool(int, int)> dfs = [&](int v, int from) -> bool {
                    for (int w : g.neighbors(v))
                    {
                        if (!in_comp(w) || w == from)
                            continue;
                        if (parent[static_cast<std::size_t>(w)] != -2)
                        {
                            for (int x = v; x != w; x = parent[static_cast<std::size_t>(x)])
                                cyc.push_back(x);
                            cyc.push_back(w);
                            return true;
                        }
                        parent[static_cast<std::size_t>(w)] = v;
                        if (dfs(w, v))
                            return true;
                    }
                    return false;
                };
                parent[static_cast<std::size_t>(comp.front())] = -1;
                if (dfs(comp.front(), -1))
                {
                    // cyc = v, parent(v), ..., w with w adjacent to v: orient v -> parent(v) -> ... -> w -> v
                    for (std::size_t i = 0; i < cyc.size(); ++i)
                    {
                        const int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
                        arcs[static_cast<std::size_t>(idx.of(a, b))] = Edge{a, b};
                        done[static_cast<std::size_t>(a)] = 1;
                        frontier.push_back(a);
                    }
                }
                else
                {
                    // A tree with no root: reverse an incoming fixed edge whose tail keeps another out-edge.
                    for (int v : comp)
                    {
                        for (int w : g.neighbors(v))
                        {
                            const auto e = static_cast<std::size_t>(idx.of(v, w));
                            if (!in_comp(w) && arcs[e] == Edge{w, v} && outdeg(w) >= 2)
                            {
                                arcs[e] = Edge{v, w};
                                ++out.borrowed;
                                done[static_cast<std::size_t>(v)] = 1;
                                frontier.push_back(v);
                                break;
                            }
                        }
                        if (!frontier.empty())
                            break;
                    }
                    if (frontier.empty())
                        throw PostconditionViolation("sinkless_orientation: bad component without root or cycle");
                }
            }
            for (std::size_t head = 0; head < frontier.size(); ++head)
            {
                const int v = frontier[head];
                for (int w : g.neighbors(v))
                {
                    if (!in_comp(w) || done[static_cast<std::size_t>(w)])
                        continue;
                    arcs[static_cast<std::size_t>(idx.of(v, w))] = Edge{w, v};
                    done[static_cast<std::size_t>(w)] = 1;
                    frontier.push_back(w);
                }
            }
        }
        for (std::size_t e = 0; e < es.size(); ++e)
            if (arcs[e].first < 0)
                arcs[e] = es[e];
        out.orientation.arcs = std::move(arcs);
        out.orientation.half_edge = std::move(p.half_edge);
        if (!is_sinkless(g, out.orientation))
            throw PostconditionViolation("sinkless_orientation: a node has no outgoing edge");
        return out;
    }

    // ---------------------------------------------------------------- cycle marking

    /// Bits of precision for the marking probability.
    inline constexpr unsigned kMarkBits = 32;

    /// The dyadic with kMarkBits bits nearest to 1/sqrt(n).
    inline Dyadic marking_probability(int n)
    {
        if (n < 1)
            throw PreconditionError("cycle_marking: n must be positive");
        const double scaled = std::ldexp(1.0, kMarkBits) / std::sqrt(static_cast<double>(n));
        return Dyadic(BigInt(static_cast<long long>(std::llround(scaled))), kMarkBits);
    }

    /// Zero-round marking: each node marks itself with probability ~ 1/sqrt(n). Whether the
    /// global count is right cannot be checked locally, so no flag certifies the output.
    class CycleMarking final : public LocalAlgorithm<NoInput, char>
    {
    public:
        explicit CycleMarking(int n) : threshold_(static_cast<std::uint64_t>(marking_probability(n).numerator()) << (kMarkBits - marking_probability(n).exponent())) {}

        std::string name() const override { return "cycle-marking"; }
        int radius() const override { return 0; }
        std::vector<int> tape_layout(const Graph& g) const override
        {
            return std::vector<int>(static_cast<std::size_t>(g.n()), static_cast<int>(kMarkBits));
        }
        FlagSemantics flag_semantics() const override { return FlagSemantics::None; }

        NodeResult<char> compute(const LocalView<NoInput>& view) const override
        {
            const auto u = view.bits_value(view.center(), 0, static_cast<int>(kMarkBits));
            return {static_cast<char>(u < threshold_), false};
        }

    private:
        std::uint64_t threshold_;
    };

    struct CycleMarkingResult
    {
        std::vector<char> marks;
        int count = 0;
        double expected = 0; // n * marking probability
        bool within_tolerance = false; // |count - sqrt n| <= 0.2 sqrt n
    };

    inline CycleMarkingResult cycle_marking_demo(int n, std::uint64_t seed)
    {
        const Graph g = n >= 3 ? gen::cycle(n) : gen::path(n);
        const CycleMarking alg(n);
        const auto tapes = TapeAssignment::random(alg.tape_layout(g), seed);
        const auto in = no_inputs(g);
        const auto run = run_local(alg, g, std::span<const NoInput>(in), tapes);
        CycleMarkingResult r;
        r.marks = run.outputs;
        r.count = static_cast<int>(std::count(r.marks.begin(), r.marks.end(), 1));
        r.expected = n * marking_probability(n).to_double();
        r.within_tolerance = std::abs(r.count - std::sqrt(static_cast<double>(n))) <= 0.2 * std::sqrt(static_cast<double>(n));
        return r;
    }

    /// Always throws NotLocallyCheckable: the derandomizer refuses the marking problem.
    inline void cycle_marking_derandomize(int n)
    {
        const Graph g = n >= 3 ? gen::cycle(n) : gen::path(n);
        const CycleMarking alg(n);
        const auto in = no_inputs(g);
        (void)derandomize(alg, g, std::span<const NoInput>(in), identity_order(g.n()));
    }

} // namespace dlocal::apps
