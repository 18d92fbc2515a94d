#pragma once

// Small LOCAL algorithms and checkers used only by the tests.

#include "dlocal/local.hpp"

namespace dlocal::testing_algos
{
    class OwnId final : public LocalAlgorithm<NoInput, NodeId>
    {
    public:
        std::string name() const override { return "own-id"; }
        int radius() const override { return 0; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), 0); }
        NodeResult<NodeId> compute(const LocalView<NoInput>& v) const override { return {v.id(v.center()), false}; }
    };

    class FlagNode final : public LocalAlgorithm<NoInput, int>
    {
    public:
        explicit FlagNode(int target) : target_(target) {}
        std::string name() const override { return "flag-node"; }
        int radius() const override { return 0; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), 1); }
        NodeResult<int> compute(const LocalView<NoInput>& v) const override { return {0, v.center() == target_}; }

    private:
        int target_;
    };

    /// Output is the node's own tape read as an integer; never flags.
    class RandomMarks final : public LocalAlgorithm<NoInput, std::uint64_t>
    {
    public:
        explicit RandomMarks(int bits) : bits_(bits) {}
        std::string name() const override { return "random-marks"; }
        int radius() const override { return 0; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), bits_); }
        NodeResult<std::uint64_t> compute(const LocalView<NoInput>& v) const override
        {
            return {v.bits_value(v.center(), 0, bits_), false};
        }

    private:
        int bits_;
    };

    /// Flags with probability 1/4 (both tape bits set).
    class QuarterCoin final : public LocalAlgorithm<NoInput, int>
    {
    public:
        std::string name() const override { return "quarter-coin"; }
        int radius() const override { return 0; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), 2); }
        NodeResult<int> compute(const LocalView<NoInput>& v) const override
        {
            const int c = v.center();
            return {0, v.bit(c, 0) == 1 && v.bit(c, 1) == 1};
        }
    };

    /// Random 2^bits-coloring; a node flags when a higher-ID neighbor drew its color, so each
    /// conflict is charged to its lower-ID endpoint. Registers an exact oracle when asked.
    class RandomColoring final : public LocalAlgorithm<NoInput, int>
    {
    public:
        explicit RandomColoring(int bits, bool exact = false) : bits_(bits), exact_(exact) {}
        std::string name() const override { return "random-coloring"; }
        int radius() const override { return 1; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), bits_); }

        NodeResult<int> compute(const LocalView<NoInput>& v) const override
        {
            const int c = v.center();
            const auto mine = v.bits_value(c, 0, bits_);
            bool flag = false;
            for (int w : v.neighbors(c))
                if (v.id(w) > v.id(c) && v.bits_value(w, 0, bits_) == mine)
                    flag = true;
            return {static_cast<int>(mine), flag};
        }

        std::optional<Dyadic> exact_flag_expectation(const LocalView<NoInput>& v) const override
        {
            if (!exact_)
                return std::nullopt;
            const int c = v.center();
            // P(w's color == x) under the partial tape of w, as a count over its free bits.
            auto match = [&](int w, std::uint64_t x) -> Dyadic {
                int free = 0;
                for (int j = 0; j < bits_; ++j)
                {
                    const int want = static_cast<int>((x >> (bits_ - 1 - j)) & 1U);
                    const auto cell = v.cell(w, j);
                    if (cell == kUnfixed)
                        ++free;
                    else if (cell != want)
                        return Dyadic(0);
                }
                return Dyadic::pow2_inverse(static_cast<unsigned>(free));
            };
            Dyadic total;
            const std::uint64_t values = std::uint64_t{1} << bits_;
            for (std::uint64_t x = 0; x < values; ++x)
            {
                const Dyadic px = match(c, x);
                if (px == Dyadic(0))
                    continue;
                Dyadic none(1);
                for (int w : v.neighbors(c))
                    if (v.id(w) > v.id(c))
                        none = none * (Dyadic(1) - match(w, x));
                total += px * (Dyadic(1) - none);
            }
            return total;
        }

    private:
        int bits_;
        bool exact_;
    };

    /// Deterministic radius-2 aggregate of inputs, weighted by distance.
    class WeightedSum final : public LocalAlgorithm<long long, long long>
    {
    public:
        std::string name() const override { return "weighted-sum"; }
        int radius() const override { return 2; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), 0); }
        NodeResult<long long> compute(const LocalView<long long>& v) const override
        {
            long long s = 0;
            for (int u : v.nodes())
                s += v.input(u) * (3 - v.dist(u));
            return {s, false};
        }
    };

    /// Reads one hop further than it declares.
    class Overreach final : public LocalAlgorithm<NoInput, int>
    {
    public:
        std::string name() const override { return "overreach"; }
        int radius() const override { return 1; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), 0); }
        NodeResult<int> compute(const LocalView<NoInput>& v) const override
        {
            int s = 0;
            for (int w : v.neighbors(v.center()))
                for (int x : v.neighbors(w))
                    s += static_cast<int>(v.id(x));
            return {s, false};
        }
    };

    class ProperColoringChecker final : public LocalChecker<NoInput, int>
    {
    public:
        std::string name() const override { return "proper-coloring"; }
        int radius() const override { return 1; }
        bool check(const CheckView<NoInput, int>& v) const override
        {
            for (int w : v.neighbors(v.center()))
                if (v.output(w) == v.output(v.center()))
                    return false;
            return true;
        }
    };

} // namespace dlocal::testing_algos
