#pragma once

#include "dlocal/local.hpp"
#include "dlocal/slocal.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dlocal
{
    enum class OracleMode
    {
        Auto,      // closed form when the algorithm registers one, enumeration otherwise
        Exact,     // closed form only
        Enumerate, // enumeration only
    };

    struct OracleConfig
    {
        OracleMode mode = OracleMode::Auto;
        std::uint64_t completion_cap = std::uint64_t{1} << 20;
    };

    namespace detail
    {
        /// Depth-first walk over the bits that compute() actually reads. Each unfixed bit is
        /// set to 0 on first read; after a leaf the deepest 0 flips to 1. A leaf at depth k
        /// stands for a 2^-k fraction of all completions.
        class LazyEnumerator final : public UnfixedBitResolver
        {
        public:
            int resolve(int node, int bit) override
            {
                for (const auto& [n, b, val] : trail_)
                    if (n == node && b == bit)
                        return val;
                trail_.emplace_back(node, bit, 0);
                return 0;
            }

            unsigned depth() const noexcept { return static_cast<unsigned>(trail_.size()); }

            bool advance()
            {
                while (!trail_.empty() && std::get<2>(trail_.back()) == 1)
                    trail_.pop_back();
                if (trail_.empty())
                    return false;
                std::get<2>(trail_.back()) = 1;
                return true;
            }

        private:
            std::vector<std::tuple<int, int, int>> trail_;
        };
    } // namespace detail

    /// E[F_v | fixed bits] over uniform completions of the unfixed bits, exact.
    /// Only the radius-r window of v is read, which is what makes the value independent
    /// of every fixing outside that window.
    template <class In, class Out>
    Dyadic flag_expectation(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                            const TapeAssignment& tapes, const Ball& ball, const OracleConfig& cfg = {})
    {
        if (cfg.mode != OracleMode::Enumerate)
        {
            const LocalView<In> view(g, ball, inputs, tapes);
            if (auto e = a.exact_flag_expectation(view))
                return *e;
            if (cfg.mode == OracleMode::Exact)
                throw PreconditionError(a.name() + ": no closed-form oracle registered");
        }
        detail::LazyEnumerator en;
        const LocalView<In> view(g, ball, inputs, tapes, &en);
        Dyadic total;
        std::uint64_t leaves = 0;
        do
        {
            if (++leaves > cfg.completion_cap)
                throw CapacityError(a.name() + ": window of node " + std::to_string(ball.center()) + " exceeds " +
                                    std::to_string(cfg.completion_cap) + " completions");
            if (a.compute(view).flag)
                total += Dyadic::pow2_inverse(en.depth());
        } while (en.advance());
        return total;
    }

    template <class In, class Out>
    Dyadic flag_expectation(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                            const TapeAssignment& tapes, int v, const OracleConfig& cfg = {})
    {
        const Ball b(g, v, a.radius());
        return flag_expectation(a, g, inputs, tapes, b, cfg);
    }

    /// Reference oracle: averages F_v over every completion of the unfixed bits in v's
    /// window, by brute force. For tests; the lazy oracle must agree with it.
    template <class In, class Out>
    Dyadic flag_expectation_bruteforce(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                                       TapeAssignment tapes, int v, int max_free_bits = 22)
    {
        const Ball b(g, v, a.radius());
        std::vector<std::pair<int, int>> free;
        for (int u : b.nodes())
            for (int j = 0; j < tapes.bits(u); ++j)
                if (!tapes.is_fixed(u, j))
                    free.emplace_back(u, j);
        if (static_cast<int>(free.size()) > max_free_bits)
            throw CapacityError("bruteforce oracle: too many free bits");
        const std::uint64_t count = std::uint64_t{1} << free.size();
        BigInt hits = 0;
        for (std::uint64_t x = 0; x < count; ++x)
        {
            for (std::size_t i = 0; i < free.size(); ++i)
                tapes.set(free[i].first, free[i].second, static_cast<std::int8_t>((x >> i) & 1U));
            const LocalView<In> view(g, b, inputs, tapes);
            if (a.compute(view).flag)
                hits += 1;
        }
        return Dyadic(hits, static_cast<unsigned>(free.size()));
    }

    enum class FixingMode
    {
        PerBit,  // one tape bit at a time (default)
        PerNode, // all unfixed bits of a node at once
    };

    struct DerandomizeOptions
    {
        OracleConfig oracle{};
        FixingMode fixing = FixingMode::PerBit;
        int per_node_bit_cap = 16;
    };

    struct TraceRecord
    {
        std::size_t step = 0;
        int node = 0;
        int bit = -1;            // -1 for a whole-node fixing
        std::uint64_t value = 0; // chosen bit, or chosen tape value (bit 0 most significant)
        Dyadic before;
        Dyadic after;
    };

    template <class Out>
    struct DerandomizationResult
    {
        TapeAssignment tapes;
        LasVegasRun<Out> run;
        std::vector<TraceRecord> trace;
        Dyadic initial_expectation;
        Dyadic final_expectation;
    };

    namespace detail
    {
        /// Fixes the unfixed bits of v so each choice minimizes sum_{w : d(v,w) <= r} E[F_w].
        /// `on_choice(bit, value, window_before, window_after, new_window_values)` reports each
        /// decision. Everything read lies within distance 2r of v.
        template <class In, class Out, class OnChoice>
        void fix_node(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs, TapeAssignment& tapes,
                      int v, const std::vector<const Ball*>& window, std::vector<Dyadic> current,
                      const DerandomizeOptions& opt, OnChoice&& on_choice)
        {
            auto sum_over = [&](std::vector<Dyadic>* values) {
                Dyadic s;
                for (std::size_t i = 0; i < window.size(); ++i)
                {
                    Dyadic e = flag_expectation(a, g, inputs, tapes, *window[i], opt.oracle);
                    s += e;
                    if (values)
                        (*values)[i] = std::move(e);
                }
                return s;
            };
            auto window_sum = [&] {
                Dyadic s;
                for (const auto& e : current)
                    s += e;
                return s;
            };

            std::vector<int> free;
            for (int j = 0; j < tapes.bits(v); ++j)
                if (!tapes.is_fixed(v, j))
                    free.push_back(j);
            if (free.empty())
                return;

            if (opt.fixing == FixingMode::PerBit)
            {
                for (int j : free)
                {
                    const Dyadic before = window_sum();
                    std::vector<Dyadic> v0(window.size()), v1(window.size());
                    tapes.set(v, j, 0);
                    const Dyadic s0 = sum_over(&v0);
                    tapes.set(v, j, 1);
                    const Dyadic s1 = sum_over(&v1);
                    const int pick = s1 < s0 ? 1 : 0;
                    tapes.set(v, j, static_cast<std::int8_t>(pick));
                    current = pick ? std::move(v1) : std::move(v0);
                    on_choice(j, static_cast<std::uint64_t>(pick), before, pick ? s1 : s0, current);
                }
                return;
            }

            if (static_cast<int>(free.size()) > opt.per_node_bit_cap)
                throw CapacityError("per-node fixing: node " + std::to_string(v) + " has " + std::to_string(free.size()) +
                                    " unfixed bits");
            const Dyadic before = window_sum();
            const std::uint64_t count = std::uint64_t{1} << free.size();
            std::optional<Dyadic> best;
            std::uint64_t best_x = 0;
            std::vector<Dyadic> best_vals, vals(window.size());
            for (std::uint64_t x = 0; x < count; ++x)
            {
                // free[0] is the most significant bit of x, so x order is lexicographic order.
                for (std::size_t i = 0; i < free.size(); ++i)
                    tapes.set(v, free[i], static_cast<std::int8_t>((x >> (free.size() - 1 - i)) & 1U));
                const Dyadic s = sum_over(&vals);
                if (!best || s < *best)
                {
                    best = s;
                    best_x = x;
                    best_vals = vals;
                }
            }
            for (std::size_t i = 0; i < free.size(); ++i)
                tapes.set(v, free[i], static_cast<std::int8_t>((best_x >> (free.size() - 1 - i)) & 1U));
            on_choice(-1, tapes.value(v), before, *best, best_vals);
        }
    } // namespace detail

    template <class In, class Out>
    void require_locally_checkable(const LocalAlgorithm<In, Out>& a)
    {
        if (a.flag_semantics() != FlagSemantics::LasVegas)
            throw NotLocallyCheckable(a.name() +
                                      ": not locally checkable; its failure criterion is global, so there are no "
                                      "per-node flags whose conditional expectations could be minimized");
    }

    /// Conditional-expectation derandomization: processes nodes in `order`, fixing each tape
    /// to minimize the windowed flag expectation. The trace is non-increasing; when the initial
    /// expectation is below 1 the resulting run has no flags.
    template <class In, class Out>
    DerandomizationResult<Out> derandomize(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                                           std::span<const int> order, const DerandomizeOptions& opt = {},
                                           const TapeAssignment* start = nullptr)
    {
        require_locally_checkable(a);
        require_permutation(order, g.n());
        if (inputs.size() != static_cast<std::size_t>(g.n()))
            throw PreconditionError(a.name() + ": one input per node required");
        const auto layout = a.tape_layout(g);
        TapeAssignment tapes = start ? *start : TapeAssignment(layout);
        if (tapes.layout() != layout)
            throw PreconditionError(a.name() + ": starting tapes do not match the declared layout");

        const int r = a.radius();
        std::vector<Ball> balls;
        balls.reserve(static_cast<std::size_t>(g.n()));
        for (int v = 0; v < g.n(); ++v)
            balls.emplace_back(g, v, r);

        std::vector<Dyadic> cache(static_cast<std::size_t>(g.n()));
        Dyadic total;
        for (int v = 0; v < g.n(); ++v)
        {
            cache[static_cast<std::size_t>(v)] = flag_expectation(a, g, inputs, tapes, balls[static_cast<std::size_t>(v)], opt.oracle);
            total += cache[static_cast<std::size_t>(v)];
        }

        DerandomizationResult<Out> res;
        res.initial_expectation = total;
        std::size_t step = 0;
        for (int v : order)
        {
            // d(v, w) <= r is symmetric, so the affected flags are exactly v's own ball.
            const auto members = balls[static_cast<std::size_t>(v)].nodes();
            std::vector<const Ball*> window;
            std::vector<Dyadic> current;
            for (int w : members)
            {
                window.push_back(&balls[static_cast<std::size_t>(w)]);
                current.push_back(cache[static_cast<std::size_t>(w)]);
            }
            detail::fix_node(a, g, inputs, tapes, v, window, std::move(current), opt,
                             [&](int bit, std::uint64_t value, const Dyadic& wb, const Dyadic& wa, const std::vector<Dyadic>& vals) {
                                 TraceRecord t;
                                 t.step = step++;
                                 t.node = v;
                                 t.bit = bit;
                                 t.value = value;
                                 t.before = total;
                                 total = total - wb + wa;
                                 t.after = total;
                                 if (t.after > t.before)
                                     throw PostconditionViolation("derandomize: conditional expectation increased");
                                 for (std::size_t i = 0; i < members.size(); ++i)
                                     cache[static_cast<std::size_t>(members[i])] = vals[i];
                                 res.trace.push_back(std::move(t));
                             });
        }
        res.final_expectation = total;
        res.run = run_local(a, g, inputs, tapes);
        if (Dyadic(res.run.total_flags) != total)
            throw PostconditionViolation("derandomize: final expectation " + total.str() + " differs from realized flags " +
                                         std::to_string(res.run.total_flags));
        res.tapes = std::move(tapes);
        return res;
    }

    template <class In, class Out>
    DerandomizationResult<Out> derandomize(const LocalAlgorithm<In, Out>& a, const Graph& g, const std::vector<In>& inputs,
                                           const std::vector<int>& order, const DerandomizeOptions& opt = {},
                                           const TapeAssignment* start = nullptr)
    {
        return derandomize(a, g, std::span<const In>(inputs), std::span<const int>(order), opt, start);
    }

    /// The decision the derandomizer takes at v given the current partial tapes: v's tape
    /// bits afterwards. Reads only the radius-2r view of v.
    template <class In, class Out>
    std::vector<std::int8_t> choose_tape(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> inputs,
                                         TapeAssignment tapes, int v, const DerandomizeOptions& opt = {})
    {
        require_locally_checkable(a);
        const int r = a.radius();
        const Ball mine(g, v, r);
        std::vector<Ball> balls;
        balls.reserve(mine.size());
        for (int w : mine.nodes())
            balls.emplace_back(g, w, r);
        std::vector<const Ball*> window;
        std::vector<Dyadic> current;
        for (const auto& b : balls)
        {
            window.push_back(&b);
            current.push_back(flag_expectation(a, g, inputs, tapes, b, opt.oracle));
        }
        detail::fix_node(a, g, inputs, tapes, v, window, std::move(current), opt,
                         [](int, std::uint64_t, const Dyadic&, const Dyadic&, const std::vector<Dyadic>&) {});
        std::vector<std::int8_t> out;
        for (int j = 0; j < tapes.bits(v); ++j)
            out.push_back(tapes.get(v, j));
        return out;
    }

    using TapeBits = std::vector<std::int8_t>;

    /// The derandomizer as an SLOCAL algorithm of locality 2r: the record of a node is its
    /// chosen tape, computed from the tapes stored by earlier nodes within distance 2r.
    template <class In, class Out>
    class TapeChooser final : public SlocalAlgorithm<In, TapeBits>
    {
    public:
        TapeChooser(const LocalAlgorithm<In, Out>& a, const Graph& g, DerandomizeOptions opt = {})
            : a_(a), g_(g), layout_(a.tape_layout(g)), opt_(opt)
        {
        }
        std::string name() const override { return "tape-chooser(" + a_.name() + ")"; }
        int locality() const override { return 2 * a_.radius(); }

        TapeBits step(const SlocalView<In, TapeBits>& view) const override
        {
            TapeAssignment tapes(layout_);
            std::vector<In> inputs(static_cast<std::size_t>(g_.n()));
            for (const auto& [u, d] : view.nearby(view.center(), locality()))
            {
                (void)d;
                inputs[static_cast<std::size_t>(u)] = view.input(u);
                if (const TapeBits* rec = view.record(u))
                    for (std::size_t j = 0; j < rec->size(); ++j)
                        tapes.set(u, static_cast<int>(j), (*rec)[j]);
            }
            return choose_tape(a_, g_, std::span<const In>(inputs), std::move(tapes), view.center(), opt_);
        }

    private:
        const LocalAlgorithm<In, Out>& a_;
        const Graph& g_;
        std::vector<int> layout_;
        DerandomizeOptions opt_;
    };

    /// Runs the Las Vegas algorithm deterministically from tapes carried in the input pairs
    /// (locality r). Composed after TapeChooser this gives a single SLOCAL pass of locality 4r.
    template <class In, class Out>
    class TapeExecutor final : public SlocalAlgorithm<std::pair<In, TapeBits>, NodeResult<Out>>
    {
    public:
        TapeExecutor(const LocalAlgorithm<In, Out>& a, const Graph& g) : a_(a), g_(g), layout_(a.tape_layout(g)) {}
        std::string name() const override { return "execute(" + a_.name() + ")"; }
        int locality() const override { return a_.radius(); }

        NodeResult<Out> step(const SlocalView<std::pair<In, TapeBits>, NodeResult<Out>>& view) const override
        {
            TapeAssignment tapes(layout_);
            std::vector<In> inputs(static_cast<std::size_t>(g_.n()));
            for (const auto& [u, d] : view.nearby(view.center(), locality()))
            {
                (void)d;
                const auto& [in, bits] = view.input(u);
                inputs[static_cast<std::size_t>(u)] = in;
                for (std::size_t j = 0; j < bits.size(); ++j)
                    tapes.set(u, static_cast<int>(j), bits[j]);
            }
            const Ball b(g_, view.center(), a_.radius());
            return a_.compute(LocalView<In>(g_, b, std::span<const In>(inputs), tapes));
        }

    private:
        const LocalAlgorithm<In, Out>& a_;
        const Graph& g_;
        std::vector<int> layout_;
    };

} // namespace dlocal
