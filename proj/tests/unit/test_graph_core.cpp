#include "dlocal/generators.hpp"
#include "dlocal/graph.hpp"
#include "dlocal/graph_io.hpp"
#include "dlocal/hypergraph.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace dlocal;

namespace
{
    // Independent all-pairs distance oracle (Floyd-Warshall on an adjacency matrix).
    std::vector<std::vector<int>> all_pairs(const Graph& g)
    {
        const int n = g.n();
        const int inf = 1 << 28;
        std::vector<std::vector<int>> d(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), inf));
        for (int u = 0; u < n; ++u)
        {
            d[u][u] = 0;
            for (int v : g.neighbors(u))
                d[u][v] = 1;
        }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
        return d;
    }

    bool connected_within(const Graph& g, const std::vector<int>& part)
    {
        std::set<int> in(part.begin(), part.end()), seen{part.front()};
        std::vector<int> st{part.front()};
        while (!st.empty())
        {
            int u = st.back();
            st.pop_back();
            for (int w : g.neighbors(u))
                if (in.count(w) && seen.insert(w).second)
                    st.push_back(w);
        }
        return seen.size() == in.size();
    }
} // namespace

TEST(BuildGraph, SingleIsolatedNode)
{
    const Graph g = build_graph(1, std::vector<Edge>{});
    EXPECT_EQ(g.n(), 1);
    EXPECT_EQ(g.max_degree(), 0);
    EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraph, TriangleIsSymmetric)
{
    const Graph g = build_graph(3, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}});
    EXPECT_EQ(g.max_degree(), 2);
    for (int u = 0; u < 3; ++u)
        for (int v : g.neighbors(u))
            EXPECT_TRUE(g.has_edge(v, u));
}

TEST(BuildGraph, CompleteGraphEdgeCount)
{
    const Graph g = gen::complete(4);
    // Enumerated: pairs of {0,1,2,3}.
    EXPECT_EQ(g.edge_count(), 6u);
    EXPECT_EQ(g.max_degree(), 3);
}

TEST(BuildGraph, DuplicatesCollapseAndErrorsRaised)
{
    const Graph g = build_graph(2, std::vector<Edge>{{0, 1}, {1, 0}, {0, 1}});
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_THROW(build_graph(2, std::vector<Edge>{{0, 0}}), MalformedInput);
    EXPECT_THROW(build_graph(2, std::vector<Edge>{{0, 2}}), MalformedInput);
    EXPECT_THROW(build_graph(2, std::vector<Edge>{{-1, 1}}), MalformedInput);
}

TEST(BuildGraph, DefaultIdSpaceIsCubic)
{
    EXPECT_EQ(build_graph(10, std::vector<Edge>{}).id_space(), 1000u);
    EXPECT_THROW(build_graph(3, std::vector<Edge>{}).with_ids({0, 0, 1}, 27), MalformedInput);
}

TEST(PowerGraph, PathSquaredIsTriangle)
{
    const Graph p = power_graph(gen::path(3), 2);
    EXPECT_EQ(p.edge_count(), 3u);
    EXPECT_TRUE(p.has_edge(0, 2));
}

TEST(PowerGraph, FirstPowerIsIdentity)
{
    const Graph g = gen::random_regular(12, 3, 4);
    EXPECT_EQ(power_graph(g, 1), g);
    EXPECT_THROW(power_graph(g, 0), PreconditionError);
}

TEST(PowerGraph, SixCycleCubedIsComplete)
{
    const Graph p = power_graph(gen::cycle(6), 3);
    EXPECT_EQ(p.edge_count(), 15u);
}

TEST(PowerGraph, MatchesAllPairsOracleOnRandomGraphs)
{
    for (std::uint64_t seed = 0; seed < 25; ++seed)
    {
        const int n = 5 + static_cast<int>(seed % 46);
        const Graph g = gen::gnm(n, static_cast<std::size_t>(n + seed % 7), seed);
        const auto d = all_pairs(g);
        for (int r : {1, 2, 3, 5})
        {
            const Graph p = power_graph(g, r);
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    ASSERT_EQ(p.has_edge(u, v), u != v && d[u][v] <= r) << "seed " << seed << " r " << r;
        }
    }
}

TEST(IncidenceGraph, SingleEdgeIsStar)
{
    const Hypergraph h(3, {{0, 1, 2}});
    const auto inc = incidence_graph(h);
    EXPECT_EQ(inc.graph.n(), 4);
    EXPECT_EQ(inc.graph.degree(inc.node_of_edge(0)), 3);
    EXPECT_TRUE(inc.is_edge_node(3));
}

TEST(IncidenceGraph, DisjointEdgesGiveDisjointStars)
{
    const Hypergraph h(4, {{0, 1}, {2, 3}});
    const auto inc = incidence_graph(h);
    EXPECT_EQ(components(inc.graph).size(), 2u);
}

TEST(IncidenceGraph, VertexDegreeCountsIncidences)
{
    const Hypergraph h(4, {{0, 1}, {0, 2}, {0, 3}});
    EXPECT_EQ(incidence_graph(h).graph.degree(0), 3);
}

TEST(IncidenceGraph, BipartiteBySideLabels)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto h = gen::random_hypergraph(15, 12, 4, seed);
        const auto inc = incidence_graph(h);
        for (int x = 0; x < inc.graph.n(); ++x)
            for (int y : inc.graph.neighbors(x))
                ASSERT_NE(inc.is_edge_node(x), inc.is_edge_node(y));
    }
}

TEST(LineGraph, DisjointAndSharing)
{
    EXPECT_EQ(line_graph(Hypergraph(4, {{0, 1}, {2, 3}})).edge_count(), 0u);
    EXPECT_EQ(line_graph(Hypergraph(3, {{0, 1}, {1, 2}})).edge_count(), 1u);
}

TEST(LineGraph, FiveEdgeInstanceDegrees)
{
    // rank 3, max degree 2.
    const Hypergraph h(7, {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}, {0, 3, 6}, {1, 5}});
    ASSERT_EQ(h.rank(), 3);
    ASSERT_EQ(h.max_degree(), 2);
    const Graph l = line_graph(h);
    for (std::size_t e = 0; e < h.m(); ++e)
        for (std::size_t f = 0; f < h.m(); ++f)
        {
            std::set<int> a(h.edge(e).begin(), h.edge(e).end());
            bool meet = false;
            for (int v : h.edge(f))
                meet |= a.count(v) > 0;
            EXPECT_EQ(l.has_edge(static_cast<int>(e), static_cast<int>(f)), e != f && meet);
        }
    EXPECT_LE(l.max_degree(), 6);
}

TEST(LineGraph, DegreeBoundOnRandomHypergraphs)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed)
    {
        const auto h = gen::random_hypergraph(30, 25, 1 + static_cast<int>(seed % 5), seed);
        EXPECT_LE(line_graph(h).max_degree(), h.rank() * h.max_degree());
    }
}

TEST(Components, EmptySubset)
{
    EXPECT_EQ(components(gen::path(4), std::vector<int>{}).size(), 0u);
}

TEST(Components, TriangleSubset)
{
    EXPECT_EQ(components(gen::cycle(3), std::vector<int>{0, 2}).size(), 1u);
}

TEST(Components, AlternatePathNodesAreSingletons)
{
    const auto p = components(gen::path(5), std::vector<int>{0, 2, 4});
    EXPECT_EQ(p.size(), 3u);
}

TEST(Components, PartitionPropertiesOnRandomInputs)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed)
    {
        const Graph g = gen::gnm(40, 50, seed);
        Rng rng(seed);
        std::vector<int> subset;
        for (int v = 0; v < g.n(); ++v)
            if (rng.coin())
                subset.push_back(v);
        const auto p = components(g, subset);
        std::multiset<int> covered;
        for (const auto& part : p.parts)
        {
            ASSERT_TRUE(connected_within(g, part));
            covered.insert(part.begin(), part.end());
        }
        EXPECT_EQ(covered, std::multiset<int>(subset.begin(), subset.end()));
        // Maximality: no induced edge between different parts.
        for (int u : subset)
            for (int w : g.neighbors(u))
                if (p.label[w] >= 0)
                    EXPECT_EQ(p.label[u], p.label[w]);
    }
}

TEST(Generators, BasicShapes)
{
    EXPECT_EQ(gen::cycle(3), gen::complete(3));
    EXPECT_EQ(gen::grid(4, 3).edge_count(), 17u);
    EXPECT_THROW(gen::cycle(2), GeneratorError);
    EXPECT_THROW(gen::random_regular(7, 3, 1), GeneratorError);
}

TEST(Generators, RandomRegularDeterministicAndRegular)
{
    const Graph a = gen::random_regular(8, 3, 1);
    const Graph b = gen::random_regular(8, 3, 1);
    EXPECT_EQ(a, b);
    for (int v = 0; v < a.n(); ++v)
        EXPECT_EQ(a.degree(v), 3);
}

TEST(Generators, RandomHypergraphRank)
{
    const auto h = gen::random_hypergraph(20, 10, 3, 7);
    EXPECT_EQ(h.m(), 10u);
    for (const auto& e : h.edges())
        EXPECT_LE(e.size(), 3u);
}

TEST(Generators, BoundedHypergraphRespectsDegree)
{
    const auto h = gen::random_hypergraph_bounded(100, 150, 4, 8, 3);
    EXPECT_LE(h.max_degree(), 8);
    EXPECT_LE(h.rank(), 4);
}

TEST(Generators, ForestUnionCertificate)
{
    const auto c = gen::forest_union(30, 3, 9);
    const auto es = c.graph.edges();
    ASSERT_EQ(es.size(), c.forest_of_edge.size());
    // Each certificate class must be acyclic: union-find per forest.
    for (int f = 0; f < 3; ++f)
    {
        std::vector<int> parent(30);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        for (std::size_t i = 0; i < es.size(); ++i)
            if (c.forest_of_edge[i] == f)
            {
                const int a = find(es[i].first), b = find(es[i].second);
                ASSERT_NE(a, b);
                parent[a] = b;
            }
    }
}

TEST(GraphIo, RoundTrip)
{
    const Graph g = gen::gnm(20, 30, 5);
    const std::string text = io::to_string(g);
    std::istringstream in(text);
    const Graph back = io::read_graph(in);
    EXPECT_EQ(back, g);
    EXPECT_EQ(io::to_string(back), text);

    const auto h = gen::random_hypergraph(12, 9, 4, 5);
    std::istringstream hin(io::to_string(h));
    EXPECT_EQ(io::read_hypergraph(hin), h);
}

TEST(GraphIo, RejectsMalformed)
{
    std::istringstream bad("3 1\n0 x\n");
    EXPECT_THROW(io::read_graph(bad), MalformedInput);
    std::istringstream loop("3 1\n1 1\n");
    EXPECT_THROW(io::read_graph(loop), MalformedInput);
    std::istringstream rank("3 1 2\n0 1 2\n");
    EXPECT_THROW(io::read_hypergraph(rank), MalformedInput);
}
