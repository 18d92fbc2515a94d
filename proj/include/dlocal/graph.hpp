#pragma once

#include "dlocal/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dlocal
{
    using NodeId = std::uint64_t;
    using Edge = std::pair<int, int>;

    /// n^3, saturating at the largest representable ID space.
    constexpr NodeId default_id_space(std::size_t n) noexcept
    {
        const NodeId m = std::max<NodeId>(n, 1);
        constexpr NodeId lim = std::numeric_limits<NodeId>::max();
        if (m > lim / m || m * m > lim / m)
            return lim;
        return std::max<NodeId>(m * m * m, 1);
    }

    /// Simple undirected graph over dense node indices 0..n-1, each carrying a unique ID.
    class Graph
    {
    public:
        Graph() = default;

        int n() const noexcept { return static_cast<int>(adj_.size()); }
        std::span<const int> neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
        int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
        NodeId id(int v) const { return ids_[static_cast<std::size_t>(v)]; }
        std::span<const NodeId> ids() const noexcept { return ids_; }
        NodeId id_space() const noexcept { return id_space_; }
        std::size_t edge_count() const noexcept { return edge_count_; }

        int max_degree() const noexcept
        {
            int d = 0;
            for (const auto& a : adj_)
                d = std::max(d, static_cast<int>(a.size()));
            return d;
        }

        int min_degree() const noexcept
        {
            if (adj_.empty())
                return 0;
            int d = std::numeric_limits<int>::max();
            for (const auto& a : adj_)
                d = std::min(d, static_cast<int>(a.size()));
            return d;
        }

        bool has_edge(int u, int v) const
        {
            const auto& a = adj_[static_cast<std::size_t>(u)];
            return std::binary_search(a.begin(), a.end(), v);
        }

        /// Edges with u < v, sorted lexicographically. Edge index = position in this list.
        std::vector<Edge> edges() const
        {
            std::vector<Edge> out;
            out.reserve(edge_count_);
            for (int u = 0; u < n(); ++u)
                for (int v : neighbors(u))
                    if (u < v)
                        out.emplace_back(u, v);
            return out;
        }

        /// Nodes sorted by ascending ID.
        std::vector<int> nodes_by_id() const
        {
            std::vector<int> order(adj_.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) { return id(a) < id(b); });
            return order;
        }

        /// Same structure with replacement IDs; they must be unique and below id_space.
        Graph with_ids(std::vector<NodeId> ids, NodeId id_space) const
        {
            if (ids.size() != adj_.size())
                throw MalformedInput("with_ids: expected " + std::to_string(adj_.size()) + " ids");
            std::vector<NodeId> sorted = ids;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw MalformedInput("with_ids: duplicate node id");
            if (!sorted.empty() && sorted.back() >= id_space)
                throw MalformedInput("with_ids: id outside id space");
            Graph g = *this;
            g.ids_ = std::move(ids);
            g.id_space_ = id_space;
            return g;
        }

        friend bool operator==(const Graph& a, const Graph& b)
        {
            return a.adj_ == b.adj_ && a.ids_ == b.ids_ && a.id_space_ == b.id_space_;
        }

    private:
        friend Graph build_graph(std::size_t, std::span<const Edge>, std::optional<NodeId>);

        std::vector<std::vector<int>> adj_;
        std::vector<NodeId> ids_;
        NodeId id_space_ = 1;
        std::size_t edge_count_ = 0;
    };

    /// Builds a graph on n nodes with default IDs 0..n-1; duplicate edges collapse.
    inline Graph build_graph(std::size_t n, std::span<const Edge> edges, std::optional<NodeId> id_space = std::nullopt)
    {
        Graph g;
        g.adj_.assign(n, {});
        g.ids_.resize(n);
        std::iota(g.ids_.begin(), g.ids_.end(), NodeId{0});
        g.id_space_ = id_space.value_or(default_id_space(n));
        if (n > 0 && g.id_space_ < n)
            throw MalformedInput("build_graph: id space smaller than n");
        for (const auto& [u, v] : edges)
        {
            if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
                throw MalformedInput("build_graph: endpoint out of range in edge (" + std::to_string(u) + "," +
                                     std::to_string(v) + ")");
            if (u == v)
                throw MalformedInput("build_graph: self-loop at node " + std::to_string(u));
            g.adj_[static_cast<std::size_t>(u)].push_back(v);
            g.adj_[static_cast<std::size_t>(v)].push_back(u);
        }
        std::size_t twice = 0;
        for (auto& a : g.adj_)
        {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
            twice += a.size();
        }
        g.edge_count_ = twice / 2;
        return g;
    }

    inline Graph build_graph(std::size_t n, const std::vector<Edge>& edges, std::optional<NodeId> id_space = std::nullopt)
    {
        return build_graph(n, std::span<const Edge>(edges), id_space);
    }

    /// Sentinel distance for unreachable nodes.
    inline constexpr int kUnreached = -1;

    /// BFS hop distances from src, exploring at most max_dist hops (negative = unbounded).
    inline std::vector<int> bfs_distances(const Graph& g, int src, int max_dist = -1)
    {
        std::vector<int> dist(static_cast<std::size_t>(g.n()), kUnreached);
        std::deque<int> q;
        dist[static_cast<std::size_t>(src)] = 0;
        q.push_back(src);
        while (!q.empty())
        {
            const int u = q.front();
            q.pop_front();
            const int du = dist[static_cast<std::size_t>(u)];
            if (max_dist >= 0 && du >= max_dist)
                continue;
            for (int w : g.neighbors(u))
                if (dist[static_cast<std::size_t>(w)] == kUnreached)
                {
                    dist[static_cast<std::size_t>(w)] = du + 1;
                    q.push_back(w);
                }
        }
        return dist;
    }

    /// Nodes within distance r of v, ascending index.
    inline std::vector<int> ball(const Graph& g, int v, int r)
    {
        const auto dist = bfs_distances(g, v, r);
        std::vector<int> out;
        for (int u = 0; u < g.n(); ++u)
            if (dist[static_cast<std::size_t>(u)] != kUnreached)
                out.push_back(u);
        return out;
    }

    /// G^r: u ~ v iff 1 <= dist(u, v) <= r. IDs are preserved.
    inline Graph power_graph(const Graph& g, int r)
    {
        if (r < 1)
            throw PreconditionError("power_graph: r must be >= 1");
        std::vector<Edge> edges;
        for (int u = 0; u < g.n(); ++u)
        {
            const auto dist = bfs_distances(g, u, r);
            for (int v = u + 1; v < g.n(); ++v)
                if (dist[static_cast<std::size_t>(v)] != kUnreached)
                    edges.emplace_back(u, v);
        }
        Graph p = build_graph(static_cast<std::size_t>(g.n()), edges, g.id_space());
        return p.with_ids(std::vector<NodeId>(g.ids().begin(), g.ids().end()), g.id_space());
    }

    /// Subgraph induced by `nodes` (re-indexed in the given order), keeping IDs.
    inline Graph induced_subgraph(const Graph& g, std::span<const int> nodes)
    {
        std::vector<int> local(static_cast<std::size_t>(g.n()), -1);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            local[static_cast<std::size_t>(nodes[i])] = static_cast<int>(i);
        std::vector<Edge> edges;
        std::vector<NodeId> ids;
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            ids.push_back(g.id(nodes[i]));
            for (int w : g.neighbors(nodes[i]))
            {
                const int j = local[static_cast<std::size_t>(w)];
                if (j > static_cast<int>(i))
                    edges.emplace_back(static_cast<int>(i), j);
            }
        }
        Graph h = build_graph(nodes.size(), edges, g.id_space());
        return h.with_ids(std::move(ids), g.id_space());
    }

    /// Connected components of G[subset].
    struct VertexPartition
    {
        std::vector<std::vector<int>> parts;  // each sorted ascending
        std::vector<int> label;               // node -> part index, -1 outside the subset

        std::size_t size() const noexcept { return parts.size(); }
    };

    inline VertexPartition components(const Graph& g, std::span<const int> subset)
    {
        VertexPartition out;
        out.label.assign(static_cast<std::size_t>(g.n()), -1);
        std::vector<char> in(static_cast<std::size_t>(g.n()), 0);
        for (int v : subset)
        {
            if (v < 0 || v >= g.n())
                throw PreconditionError("components: node outside graph");
            in[static_cast<std::size_t>(v)] = 1;
        }
        std::vector<int> sorted(subset.begin(), subset.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (int s : sorted)
        {
            if (out.label[static_cast<std::size_t>(s)] != -1)
                continue;
            const int c = static_cast<int>(out.parts.size());
            std::vector<int> part{s};
            out.label[static_cast<std::size_t>(s)] = c;
            for (std::size_t head = 0; head < part.size(); ++head)
                for (int w : g.neighbors(part[head]))
                    if (in[static_cast<std::size_t>(w)] && out.label[static_cast<std::size_t>(w)] == -1)
                    {
                        out.label[static_cast<std::size_t>(w)] = c;
                        part.push_back(w);
                    }
            std::sort(part.begin(), part.end());
            out.parts.push_back(std::move(part));
        }
        return out;
    }

    inline VertexPartition components(const Graph& g)
    {
        std::vector<int> all(static_cast<std::size_t>(g.n()));
        std::iota(all.begin(), all.end(), 0);
        return components(g, all);
    }

    /// Proper coloring greedy in ascending ID order; colors are 0-based.
    inline std::vector<int> greedy_coloring(const Graph& g)
    {
        std::vector<int> color(static_cast<std::size_t>(g.n()), -1);
        std::vector<char> used;
        for (int v : g.nodes_by_id())
        {
            used.assign(static_cast<std::size_t>(g.degree(v)) + 1, 0);
            for (int w : g.neighbors(v))
            {
                const int c = color[static_cast<std::size_t>(w)];
                if (c >= 0 && c < static_cast<int>(used.size()))
                    used[static_cast<std::size_t>(c)] = 1;
            }
            int c = 0;
            while (used[static_cast<std::size_t>(c)])
                ++c;
            color[static_cast<std::size_t>(v)] = c;
        }
        return color;
    }

} // namespace dlocal
