#pragma once

#include "dlocal/graph.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace dlocal
{
    /// Hypergraph over vertices 0..n-1. Each hyperedge is a sorted vertex list; parallel
    /// hyperedges are kept as distinct edges.
    class Hypergraph
    {
    public:
        Hypergraph() = default;

        Hypergraph(int n, std::vector<std::vector<int>> edges) : n_(n), edges_(std::move(edges))
        {
            if (n < 0)
                throw MalformedInput("hypergraph: negative vertex count");
            incident_.assign(static_cast<std::size_t>(n), {});
            for (std::size_t e = 0; e < edges_.size(); ++e)
            {
                auto& ed = edges_[e];
                if (ed.empty())
                    throw MalformedInput("hypergraph: empty hyperedge " + std::to_string(e));
                std::sort(ed.begin(), ed.end());
                ed.erase(std::unique(ed.begin(), ed.end()), ed.end());
                if (ed.front() < 0 || ed.back() >= n)
                    throw MalformedInput("hypergraph: hyperedge " + std::to_string(e) + " has a vertex out of range");
                rank_ = std::max(rank_, static_cast<int>(ed.size()));
                for (int v : ed)
                    incident_[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));
            }
            for (const auto& inc : incident_)
                max_degree_ = std::max(max_degree_, static_cast<int>(inc.size()));
        }

        int n() const noexcept { return n_; }
        std::size_t m() const noexcept { return edges_.size(); }
        int rank() const noexcept { return rank_; }
        int max_degree() const noexcept { return max_degree_; }
        std::span<const int> edge(std::size_t e) const { return edges_[e]; }
        const std::vector<std::vector<int>>& edges() const noexcept { return edges_; }
        std::span<const int> incident(int v) const { return incident_[static_cast<std::size_t>(v)]; }
        int degree(int v) const { return static_cast<int>(incident_[static_cast<std::size_t>(v)].size()); }

        /// Sub-hypergraph keeping the listed edges (in order) over the same vertex set.
        Hypergraph restrict_edges(std::span<const int> keep) const
        {
            std::vector<std::vector<int>> es;
            es.reserve(keep.size());
            for (int e : keep)
                es.push_back(edges_[static_cast<std::size_t>(e)]);
            return Hypergraph(n_, std::move(es));
        }

        friend bool operator==(const Hypergraph& a, const Hypergraph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

    private:
        int n_ = 0;
        std::vector<std::vector<int>> edges_;
        std::vector<std::vector<int>> incident_;
        int rank_ = 0;
        int max_degree_ = 0;
    };

    /// Bipartite incidence graph: nodes 0..n-1 are hypergraph vertices, n..n+m-1 are hyperedges.
    struct IncidenceGraph
    {
        Graph graph;
        int vertex_count = 0;

        bool is_edge_node(int x) const noexcept { return x >= vertex_count; }
        int edge_of(int x) const noexcept { return x - vertex_count; }
        int node_of_edge(int e) const noexcept { return vertex_count + e; }
    };

    inline IncidenceGraph incidence_graph(const Hypergraph& h)
    {
        std::vector<Edge> es;
        for (std::size_t e = 0; e < h.m(); ++e)
            for (int v : h.edge(e))
                es.emplace_back(v, h.n() + static_cast<int>(e));
        const std::size_t total = static_cast<std::size_t>(h.n()) + h.m();
        return IncidenceGraph{build_graph(total, es), h.n()};
    }

    /// One node per hyperedge, adjacent iff the hyperedges intersect.
    inline Graph line_graph(const Hypergraph& h)
    {
        std::vector<Edge> es;
        for (int v = 0; v < h.n(); ++v)
        {
            const auto inc = h.incident(v);
            for (std::size_t i = 0; i < inc.size(); ++i)
                for (std::size_t j = i + 1; j < inc.size(); ++j)
                    es.emplace_back(inc[i], inc[j]);
        }
        Graph g = build_graph(h.m(), es);
        if (g.max_degree() > h.rank() * h.max_degree())
            throw PostconditionViolation("line_graph: degree exceeds rank * max_degree");
        return g;
    }

} // namespace dlocal
