#include "dlocal/generators.hpp"
#include "dlocal/local.hpp"

#include "test_algorithms.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace dlocal;
using namespace dlocal::testing_algos;

TEST(RunLocal, OwnIdHasNoFlags)
{
    const Graph g = gen::random_regular(10, 3, 2);
    const OwnId a;
    const auto tapes = TapeAssignment::random(a.tape_layout(g), 1);
    const auto run = run_local(a, g, no_inputs(g), tapes);
    for (int v = 0; v < g.n(); ++v)
    {
        EXPECT_EQ(run.outputs[v], g.id(v));
        EXPECT_EQ(run.flags[v], 0);
    }
    EXPECT_EQ(run.total_flags, 0);
}

TEST(RunLocal, DeterministicGivenTapes)
{
    const Graph g = gen::cycle(64);
    const RandomMarks a(3);
    const auto tapes = TapeAssignment::random(a.tape_layout(g), 77);
    EXPECT_EQ(run_local(a, g, no_inputs(g), tapes), run_local(a, g, no_inputs(g), tapes));
    // Node v's tape is a function of (seed, v) only.
    const auto other = TapeAssignment::random(std::vector<int>(100, 3), 77);
    for (int v = 0; v < g.n(); ++v)
        EXPECT_EQ(tapes.bit_string(v), other.bit_string(v));
}

TEST(RunLocal, TotalFlagsIsSumOfFlags)
{
    const Graph g = gen::gnm(30, 60, 3);
    const RandomColoring a(2);
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto run = run_local(a, g, no_inputs(g), TapeAssignment::random(a.tape_layout(g), s));
        long long sum = 0;
        for (char f : run.flags)
            sum += f;
        EXPECT_EQ(sum, run.total_flags);
    }
}

TEST(RunLocal, RejectsIncompleteOrMismatchedTapes)
{
    const Graph g = gen::path(4);
    const RandomColoring a(2);
    EXPECT_THROW(run_local(a, g, no_inputs(g), TapeAssignment(a.tape_layout(g))), PreconditionError);
    EXPECT_THROW(run_local(a, g, no_inputs(g), TapeAssignment::random(uniform_layout(4, 3), 1)), PreconditionError);
}

TEST(RunLocal, ReadingOutsideTheViewIsAContractViolation)
{
    const Graph g = gen::path(5);
    const Overreach a;
    EXPECT_THROW(run_local(a, g, no_inputs(g), TapeAssignment(a.tape_layout(g))), ContractViolation);
}

TEST(Locality, PerturbingFarStateLeavesOutputUnchanged)
{
    const Graph g = gen::gnm(40, 70, 11);
    const RandomColoring coloring(3);
    const WeightedSum weighted;
    Rng rng(5);
    int perturbations = 0;
    for (int rep = 0; rep < 120; ++rep)
    {
        const int v = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(g.n())));
        const auto dist = bfs_distances(g, v);

        auto tapes = TapeAssignment::random(coloring.tape_layout(g), rng());
        const auto base = run_local(coloring, g, no_inputs(g), tapes);
        std::vector<long long> inputs(static_cast<std::size_t>(g.n()));
        for (auto& x : inputs)
            x = static_cast<long long>(rng.uniform_below(100));
        const auto wbase = run_local(weighted, g, inputs, TapeAssignment(weighted.tape_layout(g)));

        for (int u = 0; u < g.n(); ++u)
        {
            const bool far = dist[u] == kUnreached;
            if (far || dist[u] > coloring.radius())
                for (int j = 0; j < tapes.bits(u); ++j)
                    tapes.set(u, j, static_cast<std::int8_t>(rng.coin()));
            if (far || dist[u] > weighted.radius())
                inputs[u] += 1 + static_cast<long long>(rng.uniform_below(5));
        }
        const auto after = run_local(coloring, g, no_inputs(g), tapes);
        ASSERT_EQ(after.outputs[v], base.outputs[v]);
        ASSERT_EQ(after.flags[v], base.flags[v]);
        const auto wafter = run_local(weighted, g, inputs, TapeAssignment(weighted.tape_layout(g)));
        ASSERT_EQ(wafter.outputs[v], wbase.outputs[v]);
        ++perturbations;
    }
    EXPECT_GE(perturbations, 100);
}

TEST(Estimate, NeverFlaggingIsExactlyZero)
{
    const Graph g = gen::cycle(12);
    const OwnId a;
    const auto est = estimate_flag_expectation(a, g, std::span<const NoInput>(no_inputs(g)), 50, 1);
    EXPECT_EQ(est.total_mean, 0.0);
    EXPECT_EQ(est.total_stderr, 0.0);
}

TEST(Estimate, OneAlwaysFlaggingNodeGivesOne)
{
    const Graph g = gen::cycle(12);
    const FlagNode a(4);
    const auto in = no_inputs(g);
    const auto est = estimate_flag_expectation(a, g, std::span<const NoInput>(in), 25, 1, 3);
    EXPECT_EQ(est.total_mean, 1.0);
    EXPECT_EQ(est.node_mean[4], 1.0);
    EXPECT_THROW(estimate_flag_expectation(a, g, std::span<const NoInput>(in), 0, 1), PreconditionError);
}

TEST(Estimate, ReproducibleAndWorkerIndependent)
{
    const Graph g = gen::gnm(25, 40, 8);
    const RandomColoring a(3);
    const auto in = no_inputs(g);
    const auto e1 = estimate_flag_expectation(a, g, std::span<const NoInput>(in), 200, 9, 1);
    const auto e2 = estimate_flag_expectation(a, g, std::span<const NoInput>(in), 200, 9, 4);
    EXPECT_EQ(e1.node_mean, e2.node_mean);
    EXPECT_EQ(e1.total_mean, e2.total_mean);
}

TEST(Checker, GlobalPassIffEveryNodePasses)
{
    const Graph g = gen::path(6);
    const ProperColoringChecker c;
    std::vector<int> good{0, 1, 0, 1, 0, 1}, bad{0, 1, 1, 0, 1, 0};
    const auto in = no_inputs(g);
    EXPECT_TRUE(run_checker(c, g, in, good).pass);
    const auto rep = run_checker(c, g, in, bad);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(rep.failing, (std::vector<int>{1, 2}));
}

TEST(RerandomizeIds, ZeroAlphaKeepsIds)
{
    const Graph g = gen::path(10);
    const std::vector<std::uint64_t> zero(10, 0);
    const Graph h = rerandomize_ids_with(g, zero, 10000);
    EXPECT_TRUE(std::ranges::equal(h.ids(), g.ids()));
}

TEST(RerandomizeIds, DistinctAndRecoverable)
{
    const Graph g = gen::random_regular(10, 3, 6);
    ASSERT_EQ(g.id_space(), 1000u);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 99ULL})
    {
        const Graph h = rerandomize_ids(g, 10, seed);
        std::set<NodeId> seen(h.ids().begin(), h.ids().end());
        EXPECT_EQ(seen.size(), 10u);
        for (int v = 0; v < g.n(); ++v)
        {
            EXPECT_EQ(h.id(v) % 1000, g.id(v));
            EXPECT_LE(h.id(v) / 1000, 10000u);
        }
        EXPECT_EQ(h.id_space(), 10001u * 1000u);
    }
    EXPECT_THROW(rerandomize_ids(g, 9, 1), PreconditionError);
}
