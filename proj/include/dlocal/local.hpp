#pragma once

#include "dlocal/concurrency.hpp"
#include "dlocal/numeric.hpp"
#include "dlocal/tape.hpp"
#include "dlocal/view.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dlocal
{
    /// Resolves tape bits that are unfixed in the assignment (used by enumeration oracles).
    class UnfixedBitResolver
    {
    public:
        virtual ~UnfixedBitResolver() = default;
        virtual int resolve(int node, int bit) = 0;
    };

    /// What a LOCAL algorithm sees at its center: the ball plus inputs, IDs and tapes inside it.
    template <class In>
    class LocalView : public BallView
    {
    public:
        LocalView(const Graph& g, const Ball& ball, std::span<const In> inputs, const TapeAssignment& tapes,
                  UnfixedBitResolver* resolver = nullptr)
            : BallView(g, ball), inputs_(inputs), tapes_(&tapes), resolver_(resolver)
        {
        }

        const In& input(int u) const
        {
            require(u);
            return inputs_[static_cast<std::size_t>(u)];
        }

        int tape_bits(int u) const
        {
            require(u);
            return tapes_->bits(u);
        }

        /// Bit j of u's tape. Unfixed bits go to the resolver; without one they are an error.
        int bit(int u, int j) const
        {
            require(u);
            const auto c = tapes_->get(u, j);
            if (c != kUnfixed)
                return c;
            if (resolver_ == nullptr)
                throw ContractViolation("unfixed tape bit (" + std::to_string(u) + "," + std::to_string(j) + ") read");
            return resolver_->resolve(u, j);
        }

        /// Raw cell (0, 1 or kUnfixed) for closed-form oracles that work on partial tapes.
        std::int8_t cell(int u, int j) const
        {
            require(u);
            return tapes_->get(u, j);
        }

        /// `count` bits starting at `first`, most significant first.
        std::uint64_t bits_value(int u, int first, int count) const
        {
            std::uint64_t x = 0;
            for (int j = 0; j < count; ++j)
                x = (x << 1) | static_cast<std::uint64_t>(bit(u, first + j));
            return x;
        }

    private:
        std::span<const In> inputs_;
        const TapeAssignment* tapes_;
        UnfixedBitResolver* resolver_;
    };

    template <class Out>
    struct NodeResult
    {
        Out output{};
        bool flag = false;
    };

    /// LasVegas: the flag of every node is certified by the algorithm's own local check, so
    /// an all-zero flag vector proves the output correct. None: no such certificate.
    enum class FlagSemantics
    {
        LasVegas,
        None,
    };

    template <class In, class Out>
    class LocalAlgorithm
    {
    public:
        using input_type = In;
        using output_type = Out;

        virtual ~LocalAlgorithm() = default;

        virtual std::string name() const = 0;
        virtual int radius() const = 0;
        virtual std::vector<int> tape_layout(const Graph& g) const = 0;
        virtual NodeResult<Out> compute(const LocalView<In>& view) const = 0;

        virtual FlagSemantics flag_semantics() const { return FlagSemantics::LasVegas; }

        /// Optional closed form for E[F_center | fixed bits of the view]; nullopt when absent.
        virtual std::optional<Dyadic> exact_flag_expectation(const LocalView<In>&) const { return std::nullopt; }
    };

    template <class Out>
    struct LasVegasRun
    {
        std::vector<Out> outputs;
        std::vector<char> flags;
        long long total_flags = 0;

        friend bool operator==(const LasVegasRun&, const LasVegasRun&) = default;
    };

    template <class In, class Out>
    void require_tapes_match(const LocalAlgorithm<In, Out>& a, const Graph& g, const TapeAssignment& tapes)
    {
        if (tapes.layout() != a.tape_layout(g))
            throw PreconditionError(a.name() + ": tape layout does not match the algorithm's declaration");
    }

    template <class In, class Out>
    LasVegasRun<Out> run_local(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                               const TapeAssignment& tapes)
    {
        require_tapes_match(a, g, tapes);
        if (!tapes.complete())
            throw PreconditionError(a.name() + ": run_local needs fully fixed tapes");
        if (inputs.size() != static_cast<std::size_t>(g.n()))
            throw PreconditionError(a.name() + ": one input per node required");
        LasVegasRun<Out> run;
        run.outputs.reserve(static_cast<std::size_t>(g.n()));
        run.flags.reserve(static_cast<std::size_t>(g.n()));
        for (int v = 0; v < g.n(); ++v)
        {
            const Ball b(g, v, a.radius());
            const LocalView<In> view(g, b, inputs, tapes);
            auto r = a.compute(view);
            run.outputs.push_back(std::move(r.output));
            run.flags.push_back(r.flag ? 1 : 0);
            run.total_flags += r.flag ? 1 : 0;
        }
        return run;
    }

    template <class In, class Out>
    LasVegasRun<Out> run_local(const LocalAlgorithm<In, Out>& a, const Graph& g, const std::vector<In>& inputs,
                               const TapeAssignment& tapes)
    {
        return run_local(a, g, std::span<const In>(inputs), tapes);
    }

    inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return stream_seed(seed, trial, 0x7121a1); }

    struct FlagEstimate
    {
        std::size_t trials = 0;
        std::vector<double> node_mean;
        std::vector<double> node_stderr;
        double total_mean = 0.0;
        double total_stderr = 0.0;
    };

    /// Monte Carlo estimate of E[F_v] per node and of E[sum F_v]; trial t uses trial_seed(seed, t).
    template <class In, class Out>
    FlagEstimate estimate_flag_expectation(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                                           std::size_t trials, std::uint64_t seed, int workers = 1)
    {
        if (trials < 1)
            throw PreconditionError("estimate_flag_expectation: trials must be >= 1");
        const auto layout = a.tape_layout(g);
        std::vector<std::vector<char>> flags(trials);
        parallel_for(trials, workers, [&](std::size_t t) {
            const auto tapes = TapeAssignment::random(layout, trial_seed(seed, t));
            flags[t] = run_local(a, g, inputs, tapes).flags;
        });
        FlagEstimate est;
        est.trials = trials;
        const auto n = static_cast<std::size_t>(g.n());
        std::vector<long long> count(n, 0);
        std::vector<long long> totals(trials, 0);
        for (std::size_t t = 0; t < trials; ++t)
            for (std::size_t v = 0; v < n; ++v)
            {
                count[v] += flags[t][v];
                totals[t] += flags[t][v];
            }
        const double T = static_cast<double>(trials);
        for (std::size_t v = 0; v < n; ++v)
        {
            const double p = static_cast<double>(count[v]) / T;
            est.node_mean.push_back(p);
            est.node_stderr.push_back(trials > 1 ? std::sqrt(p * (1 - p) / (T - 1)) : 0.0);
        }
        double s = 0, s2 = 0;
        for (auto x : totals)
        {
            s += static_cast<double>(x);
            s2 += static_cast<double>(x) * static_cast<double>(x);
        }
        est.total_mean = s / T;
        const double var = trials > 1 ? std::max(0.0, (s2 - s * s / T) / (T - 1)) : 0.0;
        est.total_stderr = std::sqrt(var / T);
        return est;
    }

    /// View used by local checkers: structure, inputs and outputs inside the ball.
    template <class In, class Out>
    class CheckView : public BallView
    {
    public:
        CheckView(const Graph& g, const Ball& ball, std::span<const In> inputs, std::span<const Out> outputs)
            : BallView(g, ball), inputs_(inputs), outputs_(outputs)
        {
        }
        const In& input(int u) const
        {
            require(u);
            return inputs_[static_cast<std::size_t>(u)];
        }
        const Out& output(int u) const
        {
            require(u);
            return outputs_[static_cast<std::size_t>(u)];
        }

    private:
        std::span<const In> inputs_;
        std::span<const Out> outputs_;
    };

    template <class In, class Out>
    class LocalChecker
    {
    public:
        virtual ~LocalChecker() = default;
        virtual std::string name() const = 0;
        virtual int radius() const = 0;
        virtual bool check(const CheckView<In, Out>& view) const = 0;
    };

    struct CheckReport
    {
        std::vector<char> node_pass;
        std::vector<int> failing;
        bool pass = true;
    };

    template <class In, class Out>
    CheckReport run_checker(const LocalChecker<In, Out>& c, const Graph& g, std::span<const In> inputs,
                            std::span<const Out> outputs)
    {
        if (outputs.size() != static_cast<std::size_t>(g.n()) || inputs.size() != static_cast<std::size_t>(g.n()))
            throw PreconditionError(c.name() + ": inputs and outputs must cover every node");
        CheckReport rep;
        for (int v = 0; v < g.n(); ++v)
        {
            const Ball b(g, v, c.radius());
            const bool ok = c.check(CheckView<In, Out>(g, b, inputs, outputs));
            rep.node_pass.push_back(ok ? 1 : 0);
            if (!ok)
            {
                rep.failing.push_back(v);
                rep.pass = false;
            }
        }
        return rep;
    }

    template <class In, class Out>
    CheckReport run_checker(const LocalChecker<In, Out>& c, const Graph& g, const std::vector<In>& inputs,
                            const std::vector<Out>& outputs)
    {
        return run_checker(c, g, std::span<const In>(inputs), std::span<const Out>(outputs));
    }

    /// Empty per-node input for algorithms that only need structure and tapes.
    struct NoInput
    {
        friend bool operator==(NoInput, NoInput) { return true; }
    };

    inline std::vector<NoInput> no_inputs(const Graph& g) { return std::vector<NoInput>(static_cast<std::size_t>(g.n())); }

    /// New ID y_v = alpha_v * N + x_v with the given alphas; N is the current ID space.
    inline Graph rerandomize_ids_with(const Graph& g, std::span<const std::uint64_t> alphas, std::uint64_t max_alpha)
    {
        const NodeId N = g.id_space();
        const auto lim = std::numeric_limits<NodeId>::max();
        if (max_alpha >= lim / N || (max_alpha + 1) > lim / N)
            throw PreconditionError("rerandomize_ids: fake ID space overflows 64 bits");
        std::vector<NodeId> ids;
        ids.reserve(static_cast<std::size_t>(g.n()));
        for (int v = 0; v < g.n(); ++v)
        {
            const auto a = alphas[static_cast<std::size_t>(v)];
            if (a > max_alpha)
                throw PreconditionError("rerandomize_ids: alpha out of range");
            ids.push_back(a * N + g.id(v));
        }
        return g.with_ids(std::move(ids), (max_alpha + 1) * N);
    }

    /// Fresh IDs for running an algorithm with a fake network size n_fake >= n:
    /// alpha_v uniform in {0, ..., n_fake^4}; the old ID stays recoverable as y_v mod N.
    inline Graph rerandomize_ids(const Graph& g, std::uint64_t n_fake, std::uint64_t seed)
    {
        if (n_fake < static_cast<std::uint64_t>(g.n()))
            throw PreconditionError("rerandomize_ids: n_fake must be >= n");
        const auto lim = std::numeric_limits<std::uint64_t>::max();
        std::uint64_t max_alpha = 1;
        for (int i = 0; i < 4; ++i)
        {
            if (n_fake != 0 && max_alpha > lim / n_fake)
                throw PreconditionError("rerandomize_ids: n_fake^4 overflows 64 bits");
            max_alpha *= n_fake;
        }
        std::vector<std::uint64_t> alphas;
        for (int v = 0; v < g.n(); ++v)
        {
            Rng rng(stream_seed(seed, static_cast<std::uint64_t>(v), 0x1d5));
            alphas.push_back(rng.uniform_below(max_alpha + 1));
        }
        return rerandomize_ids_with(g, alphas, max_alpha);
    }

} // namespace dlocal
