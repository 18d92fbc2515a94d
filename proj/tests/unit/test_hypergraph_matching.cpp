#include "dlocal/generators.hpp"
#include "dlocal/hypergraph_matching.hpp"
#include "dlocal/slocal_algorithms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace dlocal;

namespace
{
    Hypergraph parallel_edges(int count)
    {
        return Hypergraph(2, std::vector<std::vector<int>>(static_cast<std::size_t>(count), {0, 1}));
    }

    // Brute force over all 2^free completions of one constrained virtual node.
    double tail_bruteforce(int red, int blue, int free, double eps)
    {
        const int d = red + blue + free;
        const double need = (1.0 - eps) * d / 2.0;
        long long hits = 0;
        for (long long x = 0; x < (1LL << free); ++x)
        {
            const int r = red + __builtin_popcountll(static_cast<unsigned long long>(~x) & ((1ULL << free) - 1));
            hits += (r < need || d - r < need) ? 1 : 0;
        }
        return static_cast<double>(hits) / static_cast<double>(1LL << free);
    }
} // namespace

TEST(MisGreedy, EdgelessCompleteAndRandom)
{
    EXPECT_EQ(mis_greedy(build_graph(5, std::vector<Edge>{})).size(), 5u);
    EXPECT_EQ(mis_greedy(gen::complete(7)), (std::vector<int>{0}));
    for (std::uint64_t s = 0; s < 30; ++s)
    {
        const Graph g = gen::gnm(40, 30 + 5 * s, s);
        const auto mis = mis_greedy(g);
        EXPECT_TRUE(is_maximal_independent_set(g, membership(g.n(), mis)));
    }
}

TEST(MisGreedy, LineGraphMisIsGreedyMatching)
{
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto h = gen::random_hypergraph(30, 40, 4, s);
        EXPECT_EQ(mis_greedy(line_graph(h)), greedy_maximal_matching(h));
    }
}

TEST(ValidateMatching, DetectsOverlapAndFreeEdge)
{
    const Hypergraph h(5, {{0, 1}, {1, 2}, {3, 4}});
    EXPECT_TRUE(validate_matching(h, std::vector<int>{0, 2}).pass());
    const auto overlap = validate_matching(h, std::vector<int>{0, 1, 2});
    EXPECT_FALSE(overlap.disjoint);
    const auto free = validate_matching(h, std::vector<int>{1});
    EXPECT_TRUE(free.disjoint);
    EXPECT_FALSE(free.maximal);
    EXPECT_EQ(free.free_edge, 2);
}

TEST(SplitThreshold, FormulaValue)
{
    // 8 ln 4 for n = 2, Delta = 2, eps = 1.
    EXPECT_NEAR(default_split_threshold(2, 2, 1.0), 11.090354888959125, 1e-12);
}

TEST(VirtualIncidence, BlocksStayWithinThresholdBand)
{
    for (int count : {5, 30, 57, 100})
        for (double delta : {4.0, 7.5, 12.0})
        {
            const auto h = parallel_edges(count);
            const auto vi = virtual_incidence(h, delta);
            const int unit = static_cast<int>(std::ceil(delta));
            std::multiset<int> seen_edges;
            for (int x = 0; x < vi.virtual_count; ++x)
            {
                const int d = vi.graph.degree(x);
                if (h.degree(vi.owner[static_cast<std::size_t>(x)]) >= 2 * unit)
                {
                    EXPECT_GE(d, delta);
                    EXPECT_LT(d, 2 * unit);
                }
                EXPECT_EQ(vi.constrained[static_cast<std::size_t>(x)] != 0, d >= delta);
                for (int w : vi.graph.neighbors(x))
                    seen_edges.insert(w - vi.virtual_count);
            }
            // Every (vertex, edge) incidence lands on exactly one copy.
            for (int e = 0; e < count; ++e)
                EXPECT_EQ(seen_edges.count(e), 2u);
        }
}

TEST(RandomSplit, ExactOracleMatchesEnumeration)
{
    const auto h = gen::random_hypergraph_bounded(10, 40, 3, 12, 4);
    const double eps = 0.6;
    SplitInstance inst(h, eps, 5.0, true);
    const auto& g = inst.incidence.graph;
    const RandomSplit plain(eps, inst.incidence.virtual_count, inst.incidence.max_virtual_degree, false);
    Rng rng(2);
    for (int rep = 0; rep < 20; ++rep)
    {
        TapeAssignment tapes(inst.algorithm.tape_layout(g));
        for (int x = inst.incidence.virtual_count; x < g.n(); ++x)
            if (rng.uniform_below(3) == 0)
                tapes.fix(x, 0, static_cast<int>(rng.coin()));
        for (int x = 0; x < inst.incidence.virtual_count; ++x)
        {
            const auto exact = flag_expectation(inst.algorithm, g, std::span<const SplitRole>(inst.roles), tapes, x,
                                                {OracleMode::Exact, 1u << 20});
            const auto en = flag_expectation(plain, g, std::span<const SplitRole>(inst.roles), tapes, x,
                                             {OracleMode::Enumerate, 1u << 20});
            ASSERT_EQ(exact, en);
        }
    }
}

TEST(RandomSplit, TailAgreesWithBruteForce)
{
    const double eps = 0.3;
    for (int red = 0; red < 4; ++red)
        for (int blue = 0; blue < 4; ++blue)
            for (int free = 0; free <= 10; ++free)
            {
                const int d = red + blue + free;
                std::vector<std::vector<int>> es(static_cast<std::size_t>(std::max(d, 1)), {0});
                const Hypergraph h(1, es);
                SplitInstance inst(h, eps, std::max(d, 1), true); // one copy of vertex 0
                const auto& g = inst.incidence.graph;
                TapeAssignment tapes(inst.algorithm.tape_layout(g));
                for (int i = 0; i < red; ++i)
                    tapes.fix(1 + i, 0, 0);
                for (int i = 0; i < blue; ++i)
                    tapes.fix(1 + red + i, 0, 1);
                if (d == 0)
                    continue;
                const auto e = flag_expectation(inst.algorithm, g, std::span<const SplitRole>(inst.roles), tapes, 0);
                EXPECT_DOUBLE_EQ(e.to_double(), tail_bruteforce(red, blue, free, eps));
            }
}

TEST(DegreeSplit, BelowThresholdIsUnconstrained)
{
    const auto h = gen::random_hypergraph(20, 15, 3, 1);
    const auto sp = degree_split(h, 0.5, RandomizedSplit{3});
    const auto rep = validate_splitting(h, sp.color, sp.eps, sp.delta);
    EXPECT_TRUE(rep.constrained.empty());
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(sp.total_flags, 0);
}

TEST(DegreeSplit, ParallelEdgesDerandomized)
{
    for (int k : {40, 60, 100})
    {
        const auto h = parallel_edges(2 * k);
        const auto sp = degree_split(h, 0.9, DerandomizedSplit{});
        ASSERT_LE(sp.delta, 2 * k);
        const auto rep = validate_splitting(h, sp.color, sp.eps, sp.delta);
        EXPECT_EQ(rep.constrained, (std::vector<int>{0, 1}));
        EXPECT_TRUE(rep.pass());
        EXPECT_EQ(sp.total_flags, 0);
        ASSERT_TRUE(sp.initial_expectation.has_value());
        EXPECT_LT(*sp.initial_expectation, Dyadic(1));
    }
}

TEST(DegreeSplit, DerandomizedIsDeterministicAndValid)
{
    for (std::uint64_t s = 0; s < 6; ++s)
    {
        const auto h = gen::random_regular_hypergraph(12, 3, 60, s);
        SplitOptions opt;
        opt.delta = 20;
        const auto a = degree_split(h, 0.6, DerandomizedSplit{}, opt);
        const auto b = degree_split(h, 0.6, DerandomizedSplit{}, opt);
        EXPECT_EQ(a.color, b.color);
        const auto rep = validate_splitting(h, a.color, a.eps, a.delta);
        EXPECT_FALSE(rep.constrained.empty());
        if (*a.initial_expectation < Dyadic(1))
        {
            EXPECT_EQ(a.total_flags, 0);
            EXPECT_TRUE(rep.pass());
        }
    }
}

TEST(DegreeSplit, OrderIsRespectedAndChecked)
{
    const auto h = parallel_edges(80);
    std::vector<int> rev(80);
    for (int i = 0; i < 80; ++i)
        rev[static_cast<std::size_t>(i)] = 79 - i;
    const auto sp = degree_split(h, 0.9, DerandomizedSplit{rev});
    EXPECT_TRUE(validate_splitting(h, sp.color, sp.eps, sp.delta).pass());
    EXPECT_THROW(degree_split(h, 0.9, DerandomizedSplit{{0, 1}}), PreconditionError);
    EXPECT_THROW(degree_split(h, 1.0, RandomizedSplit{}), PreconditionError);
}

TEST(DegreeSplit, EnumerationWithoutOracleHitsCapacity)
{
    const auto h = parallel_edges(80);
    SplitOptions opt;
    opt.exact_oracle = false;
    opt.oracle.completion_cap = 1u << 12;
    EXPECT_THROW(degree_split(h, 0.9, DerandomizedSplit{}, opt), CapacityError);
}

TEST(DegreeSplit, RandomizedExpectationBelowOne)
{
    const auto h = parallel_edges(120);
    const double eps = 0.9;
    const double delta = default_split_threshold(h.n(), h.max_degree(), eps);
    SplitInstance inst(h, eps, delta, true);
    const auto est = estimate_flag_expectation(inst.algorithm, inst.incidence.graph, std::span<const SplitRole>(inst.roles),
                                               2000, 5);
    EXPECT_LT(est.total_mean + 3 * est.total_stderr, 1.0);
}

TEST(BinnedMatching, DisjointEdgesAllSelected)
{
    const Hypergraph h(6, {{0, 1}, {2, 3}, {4, 5}});
    const std::vector<int> u{0, 1, 2, 3, 4, 5};
    const auto b = binned_partial_matching(h, u, 1);
    EXPECT_EQ(b.matching, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(b.covered_weight, 6);
}

TEST(BinnedMatching, SingleEdge)
{
    const Hypergraph h(3, {{0, 1, 2}});
    const std::vector<int> u{0, 1, 2};
    const auto b = binned_partial_matching(h, u, 1);
    EXPECT_EQ(b.matching, (std::vector<int>{0}));
    EXPECT_EQ(b.covered_weight, 3);
    EXPECT_DOUBLE_EQ(b.guaranteed, 0.5);
}

TEST(BinnedMatching, BoundOnRandomInstances)
{
    for (std::uint64_t s = 0; s < 25; ++s)
    {
        const auto h = gen::random_hypergraph_bounded(40, 60, 3, 4, s);
        std::vector<int> u;
        for (int v = 0; v < h.n(); ++v)
            if (h.degree(v) >= 2)
                u.push_back(v);
        const auto b = binned_partial_matching(h, u, 2);
        ASSERT_TRUE(validate_matching(h, b.matching).disjoint);
        long long lhs = 0;
        for (int e : b.matching)
            for (int v : h.edge(static_cast<std::size_t>(e)))
                lhs += h.degree(v) >= 2;
        EXPECT_EQ(lhs, b.covered_weight);
        EXPECT_GE(static_cast<double>(lhs), static_cast<double>(u.size()) * 2 / (2.0 * h.rank() * h.max_degree()));
    }
}

TEST(BinnedMatching, DeficientVertexNamed)
{
    const Hypergraph h(4, {{0, 1}, {1, 2}});
    const std::vector<int> u{1, 3};
    try
    {
        binned_partial_matching(h, u, 1);
        FAIL();
    }
    catch (const PreconditionError& e)
    {
        EXPECT_NE(std::string(e.what()).find("vertex 3"), std::string::npos);
    }
}

TEST(SplitSchedule, SmallInstancesDegenerate)
{
    const auto s = split_schedule(10000, 1024);
    EXPECT_EQ(s.steps, 1);
    ASSERT_EQ(s.eps.size(), 1u);
    const double dev = std::sqrt(16 * std::log(10000.0 * 1024) / 512.0);
    EXPECT_DOUBLE_EQ(s.eps[0], std::max(1.0 / 40.0, dev));
    EXPECT_DOUBLE_EQ(s.delta[0], 256.0);
}

TEST(IteratedSplit, LargeDegreeInstanceHoldsBounds)
{
    const auto h = gen::random_regular_hypergraph(512, 2, 256, 3);
    ASSERT_EQ(h.max_degree(), 256);
    const auto it = iterated_split(h);
    EXPECT_TRUE(it.fallback);
    ASSERT_EQ(it.steps.size(), 1u);
    EXPECT_EQ(it.steps[0].flags, 0);
    EXPECT_LE(it.steps[0].max_degree, 256);
    EXPECT_GE(it.steps[0].min_upper_degree, 64);
    EXPECT_EQ(it.upper.size(), 512u);
    EXPECT_TRUE(validate_matching(h.restrict_edges(it.matching), std::vector<int>{}).disjoint);
    EXPECT_TRUE(validate_matching(h, it.matching).disjoint);
    EXPECT_GE(it.covered_upper * h.rank() * 2, static_cast<int>(it.upper.size()) / 8);
}

TEST(IteratedSplit, RejectsLowDegree)
{
    const auto h = gen::random_hypergraph_bounded(100, 50, 3, 2, 1);
    EXPECT_THROW(iterated_split(h), PreconditionError);
}

TEST(MaximalMatching, SmallCases)
{
    const Hypergraph single(3, {{0, 1, 2}});
    EXPECT_EQ(hypergraph_maximal_matching(single).matching, (std::vector<int>{0}));
    const Hypergraph tri(3, {{0, 1}, {1, 2}, {0, 2}});
    const auto m = hypergraph_maximal_matching(tri);
    EXPECT_EQ(m.matching.size(), 1u);
    EXPECT_TRUE(m.direct);
    EXPECT_TRUE(hypergraph_maximal_matching(Hypergraph(4, {})).matching.empty());
}

TEST(MaximalMatching, RandomInstances)
{
    for (std::uint64_t s = 0; s < 50; ++s)
    {
        const int n = 20 + static_cast<int>(s * 37 % 181);
        const int rank = 2 + static_cast<int>(s % 3);
        const auto h = gen::random_hypergraph_bounded(n, static_cast<std::size_t>(n), rank, 8, s);
        const auto res = hypergraph_maximal_matching(h);
        const auto rep = validate_matching(h, res.matching);
        ASSERT_TRUE(rep.pass()) << "seed " << s;
        EXPECT_GE(res.matching.size() * static_cast<std::size_t>(h.rank() * h.max_degree() + 1), h.m());
    }
}

TEST(MaximalMatching, HighDegreeUsesSplitting)
{
    const auto h = gen::random_regular_hypergraph(64, 2, 128, 9);
    const auto res = hypergraph_maximal_matching(h);
    EXPECT_FALSE(res.direct);
    EXPECT_GE(res.split_rounds, 1);
    EXPECT_TRUE(validate_matching(h, res.matching).pass());
}
