#pragma once

#include "dlocal/concurrency.hpp"
#include "dlocal/derandomize.hpp"
#include "dlocal/graph.hpp"
#include "dlocal/local.hpp"
#include "dlocal/numeric.hpp"
#include "dlocal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace dlocal::lll
{
    /// Value of an undetermined variable in a partial assignment.
    inline constexpr int kStar = -1;

    /// One value per variable index; kStar marks an undetermined variable.
    using Assignment = std::vector<int>;

    struct Variable
    {
        long long id = 0;
        std::vector<Dyadic> weights; // Pr(X = j), j = 0..domain-1

        int domain() const noexcept { return static_cast<int>(weights.size()); }
    };

    inline Variable fair_coin(long long id) { return Variable{id, {Dyadic::pow2_inverse(1), Dyadic::pow2_inverse(1)}}; }

    /// Literal over a boolean variable (value 1 = true).
    struct Literal
    {
        int var = 0;
        bool positive = true;

        friend bool operator==(const Literal&, const Literal&) = default;
    };

    /// A bad event: a predicate over its scope, values passed aligned with `scope`.
    /// `evaluator` optionally gives the exact marginal for a partial scope assignment.
    struct Event
    {
        long long id = 0;
        std::vector<int> scope;
        std::function<bool(std::span<const int>)> holds;
        std::function<Dyadic(std::span<const int>)> evaluator;
        std::vector<Literal> clause; // non-empty for CNF clause events
    };

    /// Violated-clause event: true iff every literal is false.
    inline Event make_clause_event(long long id, std::vector<Literal> lits, std::span<const Variable> vars)
    {
        std::sort(lits.begin(), lits.end(), [](const Literal& a, const Literal& b) { return a.var < b.var; });
        for (std::size_t i = 1; i < lits.size(); ++i)
            if (lits[i].var == lits[i - 1].var)
                throw MalformedInput("clause " + std::to_string(id) + ": repeated variable");
        Event e;
        e.id = id;
        std::vector<int> falsifier; // value making literal i false
        std::vector<Dyadic> p_false;
        for (const auto& l : lits)
        {
            if (l.var < 0 || static_cast<std::size_t>(l.var) >= vars.size())
                throw MalformedInput("clause " + std::to_string(id) + ": unknown variable");
            if (vars[static_cast<std::size_t>(l.var)].domain() != 2)
                throw MalformedInput("clause " + std::to_string(id) + ": literal over a non-boolean variable");
            e.scope.push_back(l.var);
            const int f = l.positive ? 0 : 1;
            falsifier.push_back(f);
            p_false.push_back(vars[static_cast<std::size_t>(l.var)].weights[static_cast<std::size_t>(f)]);
        }
        e.holds = [falsifier](std::span<const int> x) {
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] != falsifier[i])
                    return false;
            return true;
        };
        e.evaluator = [falsifier, p_false](std::span<const int> x) {
            Dyadic m(1);
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                if (x[i] == kStar)
                    m = m * p_false[i];
                else if (x[i] != falsifier[i])
                    return Dyadic(0);
            }
            return m;
        };
        e.clause = std::move(lits);
        return e;
    }

    /// Large-deviation event sum_i c[i][X(scope_i)] >= t, each c in [0, 1].
    inline Event make_deviation_event(long long id, std::vector<int> scope, std::vector<std::vector<double>> c, double t)
    {
        if (c.size() != scope.size())
            throw MalformedInput("deviation event: one coefficient row per scope variable");
        for (const auto& row : c)
            for (double x : row)
                if (x < 0 || x > 1)
                    throw MalformedInput("deviation event: coefficients must lie in [0, 1]");
        Event e;
        e.id = id;
        e.scope = std::move(scope);
        e.holds = [c, t](std::span<const int> x) {
            double s = 0;
            for (std::size_t i = 0; i < x.size(); ++i)
                s += c[i][static_cast<std::size_t>(x[i])];
            return s >= t;
        };
        return e;
    }

    /// The mean sum_{i,j} c_ij Pr(X(i) = j) of a deviation event's sum.
    inline double deviation_mean(std::span<const Variable> vars, std::span<const int> scope,
                                 const std::vector<std::vector<double>>& c)
    {
        double mu = 0;
        for (std::size_t i = 0; i < scope.size(); ++i)
        {
            const auto& v = vars[static_cast<std::size_t>(scope[i])];
            for (int j = 0; j < v.domain(); ++j)
                mu += c[i][static_cast<std::size_t>(j)] * v.weights[static_cast<std::size_t>(j)].to_double();
        }
        return mu;
    }

    /// Event over a scope given by its full truth table, first scope variable most significant.
    inline Event make_table_event(long long id, std::vector<int> scope, std::vector<char> table, std::span<const Variable> vars)
    {
        std::size_t size = 1;
        std::vector<int> radix;
        for (int v : scope)
        {
            if (v < 0 || static_cast<std::size_t>(v) >= vars.size())
                throw MalformedInput("table event " + std::to_string(id) + ": unknown variable");
            radix.push_back(vars[static_cast<std::size_t>(v)].domain());
            size *= static_cast<std::size_t>(radix.back());
        }
        if (table.size() != size)
            throw MalformedInput("table event " + std::to_string(id) + ": expected " + std::to_string(size) + " entries");
        Event e;
        e.id = id;
        e.scope = std::move(scope);
        e.holds = [table, radix](std::span<const int> x) {
            std::size_t idx = 0;
            for (std::size_t i = 0; i < x.size(); ++i)
                idx = idx * static_cast<std::size_t>(radix[i]) + static_cast<std::size_t>(x[i]);
            return table[idx] != 0;
        };
        return e;
    }

    class Instance
    {
    public:
        Instance() = default;

        Instance(std::vector<Variable> vars, std::vector<Event> events) : vars_(std::move(vars)), events_(std::move(events))
        {
            for (const auto& v : vars_)
            {
                if (v.domain() < 1)
                    throw MalformedInput("variable " + std::to_string(v.id) + ": empty domain");
                Dyadic s;
                for (const auto& w : v.weights)
                {
                    if (w < Dyadic(0))
                        throw MalformedInput("variable " + std::to_string(v.id) + ": negative weight");
                    s += w;
                }
                if (s != Dyadic(1))
                    throw MalformedInput("variable " + std::to_string(v.id) + ": weights sum to " + s.str());
            }
            var_events_.assign(vars_.size(), {});
            for (std::size_t b = 0; b < events_.size(); ++b)
            {
                auto& e = events_[b];
                if (!e.holds)
                    throw MalformedInput("event " + std::to_string(e.id) + ": no predicate");
                std::vector<int> sorted = e.scope;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                    throw MalformedInput("event " + std::to_string(e.id) + ": repeated scope variable");
                for (int v : e.scope)
                {
                    if (v < 0 || static_cast<std::size_t>(v) >= vars_.size())
                        throw MalformedInput("event " + std::to_string(e.id) + ": scope references unknown variable");
                    var_events_[static_cast<std::size_t>(v)].push_back(static_cast<int>(b));
                }
            }
            std::vector<Edge> es;
            for (const auto& list : var_events_)
                for (std::size_t i = 0; i < list.size(); ++i)
                    for (std::size_t j = i + 1; j < list.size(); ++j)
                        es.emplace_back(list[i], list[j]);
            dependency_ = build_graph(events_.size(), es);
        }

        std::size_t var_count() const noexcept { return vars_.size(); }
        std::size_t event_count() const noexcept { return events_.size(); }
        const std::vector<Variable>& variables() const noexcept { return vars_; }
        const Variable& variable(int v) const { return vars_[static_cast<std::size_t>(v)]; }
        const std::vector<Event>& events() const noexcept { return events_; }
        const Event& event(int b) const { return events_[static_cast<std::size_t>(b)]; }
        std::span<const int> events_of(int v) const { return var_events_[static_cast<std::size_t>(v)]; }

        /// Events sharing a variable; node index = event index.
        const Graph& dependency() const noexcept { return dependency_; }

        /// Max dependency degree + 1.
        int d() const noexcept { return dependency_.max_degree() + 1; }

        /// N(B), which contains B itself; ascending.
        std::vector<int> neighborhood(int b) const
        {
            std::vector<int> out(dependency_.neighbors(b).begin(), dependency_.neighbors(b).end());
            out.insert(std::lower_bound(out.begin(), out.end(), b), b);
            return out;
        }

        /// Every variable a fair coin.
        bool normal_form() const
        {
            const Dyadic half = Dyadic::pow2_inverse(1);
            return std::all_of(vars_.begin(), vars_.end(), [&](const Variable& v) {
                return v.domain() == 2 && v.weights[0] == half && v.weights[1] == half;
            });
        }

        bool is_cnf() const
        {
            return std::all_of(events_.begin(), events_.end(), [](const Event& e) { return !e.clause.empty(); });
        }

    private:
        std::vector<Variable> vars_;
        std::vector<Event> events_;
        std::vector<std::vector<int>> var_events_;
        Graph dependency_;
    };

    // ---------------------------------------------------------------- probabilities

    enum class MarginalMode
    {
        Auto,
        Enumerate,
        Evaluator,
    };

    struct MarginalOptions
    {
        MarginalMode mode = MarginalMode::Auto;
        std::uint64_t cap = std::uint64_t{1} << 20;
    };

    inline std::vector<int> scope_values(const Instance& inst, int b, std::span<const int> x)
    {
        std::vector<int> out;
        for (int v : inst.event(b).scope)
            out.push_back(x[static_cast<std::size_t>(v)]);
        return out;
    }

    inline bool holds(const Instance& inst, int b, std::span<const int> x)
    {
        const auto vals = scope_values(inst, b, x);
        if (std::find(vals.begin(), vals.end(), kStar) != vals.end())
            throw PreconditionError("holds: event " + std::to_string(inst.event(b).id) + " has an undetermined variable");
        return inst.event(b).holds(vals);
    }

    /// Probability that B holds when every kStar variable of its scope is redrawn from its
    /// distribution. Only the scope is read.
    inline Dyadic marginal(const Instance& inst, int b, std::span<const int> x, const MarginalOptions& opt = {})
    {
        const auto& e = inst.event(b);
        auto vals = scope_values(inst, b, x);
        if (opt.mode != MarginalMode::Enumerate && e.evaluator)
            return e.evaluator(vals);
        if (opt.mode == MarginalMode::Evaluator)
            throw PreconditionError("marginal: event " + std::to_string(e.id) + " has no evaluator");
        std::vector<std::size_t> free;
        std::uint64_t states = 1;
        for (std::size_t i = 0; i < vals.size(); ++i)
        {
            if (vals[i] != kStar)
                continue;
            free.push_back(i);
            const auto dom = static_cast<std::uint64_t>(inst.variable(e.scope[i]).domain());
            if (states > opt.cap / dom)
                throw CapacityError("marginal: event " + std::to_string(e.id) + " needs more than " +
                                    std::to_string(opt.cap) + " completions");
            states *= dom;
        }
        Dyadic total;
        for (auto i : free)
            vals[i] = 0;
        for (;;)
        {
            Dyadic w(1);
            for (auto i : free)
                w = w * inst.variable(e.scope[i]).weights[static_cast<std::size_t>(vals[i])];
            if (!w.is_zero() && e.holds(vals))
                total += w;
            std::size_t k = 0;
            for (; k < free.size(); ++k)
            {
                auto& val = vals[free[k]];
                if (++val < inst.variable(e.scope[free[k]]).domain())
                    break;
                val = 0;
            }
            if (k == free.size())
                break;
        }
        return total;
    }

    inline Assignment all_star(const Instance& inst) { return Assignment(inst.var_count(), kStar); }

    inline Dyadic probability(const Instance& inst, int b, const MarginalOptions& opt = {})
    {
        return marginal(inst, b, all_star(inst), opt);
    }

    /// max_B Pr(B).
    inline Dyadic max_probability(const Instance& inst, const MarginalOptions& opt = {})
    {
        Dyadic p;
        for (int b = 0; b < static_cast<int>(inst.event_count()); ++b)
            p = std::max(p, probability(inst, b, opt));
        return p;
    }

    inline std::vector<int> violated_events(const Instance& inst, std::span<const int> x)
    {
        std::vector<int> out;
        for (int b = 0; b < static_cast<int>(inst.event_count()); ++b)
            if (holds(inst, b, x))
                out.push_back(b);
        return out;
    }

    inline bool is_total(std::span<const int> x) { return std::find(x.begin(), x.end(), kStar) == x.end(); }

    /// Exponent of the largest denominator among the weights: the tape bits one draw needs.
    inline unsigned draw_bits(const Variable& v)
    {
        unsigned e = 0;
        for (const auto& w : v.weights)
            e = std::max(e, w.exponent());
        return e;
    }

    /// Value whose cumulative-weight interval contains u / 2^bits.
    inline int value_from_bits(const Variable& v, std::uint64_t u, unsigned bits)
    {
        BigInt acc = 0;
        for (int j = 0; j < v.domain(); ++j)
        {
            const auto& w = v.weights[static_cast<std::size_t>(j)];
            acc += w.numerator() << (bits - w.exponent());
            if (BigInt(u) < acc)
                return j;
        }
        return v.domain() - 1;
    }

    inline int draw(const Variable& v, Rng& rng)
    {
        const unsigned bits = draw_bits(v);
        if (bits > 62)
            throw PreconditionError("variable " + std::to_string(v.id) + ": weights finer than 2^-62");
        return value_from_bits(v, rng.uniform_below(std::uint64_t{1} << bits), bits);
    }

    /// A sample from Omega; variable i draws from its own stream, so it is a function of (seed, i).
    inline Assignment sample(const Instance& inst, std::uint64_t seed)
    {
        Assignment x(inst.var_count());
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            Rng rng(stream_seed(seed, i, 0x5a3));
            x[i] = draw(inst.variables()[i], rng);
        }
        return x;
    }

    // ---------------------------------------------------------------- Moser-Tardos

    enum class MTMode
    {
        Sequential,
        ParallelRounds,
    };

    inline std::string to_string(MTMode m) { return m == MTMode::Sequential ? "sequential" : "parallel"; }

    struct MTOptions
    {
        MTMode mode = MTMode::Sequential;
        std::size_t max_steps = 1'000'000;
    };

    struct MTResult
    {
        Assignment assignment;
        bool solved = false;
        bool timed_out = false;
        std::size_t steps = 0;  // event resamplings
        std::size_t rounds = 0; // parallel rounds (or steps in sequential mode)
        std::size_t violated_at_stop = 0;
    };

    /// Moser-Tardos resampling. Sequential mode resamples the lowest-index violated event;
    /// parallel mode resamples a greedy maximal independent set of violated events per round.
    /// With `start`, resampling begins there; `resamplable` (if non-empty) limits which
    /// variables may be redrawn.
    inline MTResult moser_tardos(const Instance& inst, std::uint64_t seed, const MTOptions& opt = {},
                                 const Assignment* start = nullptr, std::span<const char> resamplable = {})
    {
        MTResult res;
        res.assignment = start ? *start : sample(inst, seed);
        if (!is_total(res.assignment))
            throw PreconditionError("moser_tardos: start assignment must be total");
        Rng rng(stream_seed(seed, 0x3e7));
        auto& x = res.assignment;
        std::set<int> bad;
        for (int b : violated_events(inst, x))
            bad.insert(b);

        auto can_fix = [&](int b) {
            if (resamplable.empty())
                return true;
            for (int v : inst.event(b).scope)
                if (resamplable[static_cast<std::size_t>(v)])
                    return true;
            return false;
        };
        auto resample = [&](int b, std::set<int>& touched) {
            for (int v : inst.event(b).scope)
            {
                if (!resamplable.empty() && !resamplable[static_cast<std::size_t>(v)])
                    continue;
                x[static_cast<std::size_t>(v)] = draw(inst.variable(v), rng);
                for (int a : inst.events_of(v))
                    touched.insert(a);
            }
        };
        auto refresh = [&](const std::set<int>& touched) {
            for (int a : touched)
            {
                if (holds(inst, a, x))
                    bad.insert(a);
                else
                    bad.erase(a);
            }
        };

        while (!bad.empty())
        {
            if (res.steps >= opt.max_steps || std::none_of(bad.begin(), bad.end(), can_fix))
            {
                res.timed_out = res.steps >= opt.max_steps;
                res.violated_at_stop = bad.size();
                return res;
            }
            std::set<int> touched;
            if (opt.mode == MTMode::Sequential)
            {
                int b = -1;
                for (int c : bad)
                    if (can_fix(c))
                    {
                        b = c;
                        break;
                    }
                resample(b, touched);
                ++res.steps;
            }
            else
            {
                std::vector<char> blocked(inst.event_count(), 0);
                std::vector<int> chosen;
                for (int b : bad)
                {
                    if (blocked[static_cast<std::size_t>(b)] || !can_fix(b))
                        continue;
                    chosen.push_back(b);
                    blocked[static_cast<std::size_t>(b)] = 1;
                    for (int a : inst.dependency().neighbors(b))
                        blocked[static_cast<std::size_t>(a)] = 1;
                }
                for (int b : chosen)
                    resample(b, touched);
                res.steps += chosen.size();
            }
            ++res.rounds;
            refresh(touched);
        }
        res.solved = true;
        return res;
    }

    // ---------------------------------------------------------------- Algorithm 1 (freezing)

    struct FreezeResult
    {
        Assignment partial;         // X'
        std::vector<char> frozen;   // K
        std::vector<int> residual;  // events with nonzero marginal under X'
        std::vector<int> coloring;  // proper coloring of the dependency graph squared, 0-based
        int colors = 0;
        double threshold = 0;        // (e d)^8 p
        double max_marginal = 0;     // max_B marginal(B, X')
        bool within_marginal_bound = true; // max_marginal <= 2 (e d)^8 p
        std::size_t draws = 0;
    };

    inline double freeze_threshold(int d, double p) { return std::pow(std::numbers::e * d, 8) * p; }

    /// Algorithm 1. Variables are drawn in the order the algorithm reaches them; the value
    /// drawn for variable i is source[i], so a sample from Omega plays the random tapes.
    inline FreezeResult algorithm1_freeze(const Instance& inst, const Assignment& source, const MarginalOptions& mopt = {})
    {
        if (source.size() != inst.var_count() || !is_total(source))
            throw PreconditionError("algorithm1_freeze: source must be a total assignment");
        const int d = inst.d();
        const int n = static_cast<int>(inst.event_count());
        FreezeResult out;
        out.threshold = freeze_threshold(d, max_probability(inst, mopt).to_double());
        out.partial = all_star(inst);
        out.frozen.assign(inst.var_count(), 0);

        if (n > 0)
        {
            const Graph sq = power_graph(inst.dependency(), 2);
            out.coloring = greedy_coloring(sq);
            out.colors = 1 + *std::max_element(out.coloring.begin(), out.coloring.end());
            if (static_cast<long long>(out.colors) > static_cast<long long>(d) * d + 1)
                throw PostconditionViolation("algorithm1_freeze: coloring uses more than d^2 + 1 colors");
        }

        auto& x = out.partial;
        for (int color = 0; color < out.colors; ++color)
            for (int b = 0; b < n; ++b)
            {
                if (out.coloring[static_cast<std::size_t>(b)] != color)
                    continue;
                for (int j : inst.event(b).scope)
                {
                    if (out.frozen[static_cast<std::size_t>(j)] || x[static_cast<std::size_t>(j)] != kStar)
                        continue;
                    x[static_cast<std::size_t>(j)] = source[static_cast<std::size_t>(j)];
                    ++out.draws;
                    // Only events containing j changed; every other A ~ B was already below the
                    // threshold or frozen. Zero-probability marginals never freeze.
                    for (int a : inst.events_of(j))
                    {
                        const Dyadic m = marginal(inst, a, x, mopt);
                        if (!m.is_zero() && m.to_double() >= out.threshold)
                            for (int k : inst.event(a).scope)
                                out.frozen[static_cast<std::size_t>(k)] = 1;
                    }
                }
            }

        // One draw multiplies a marginal by at most 1 / Pr(drawn value); below the threshold
        // before the draw means at most threshold * that factor after it.
        double factor = 1;
        for (std::size_t v = 0; v < inst.var_count(); ++v)
            if (x[v] != kStar)
                factor = std::max(factor, 1.0 / inst.variables()[v].weights[static_cast<std::size_t>(x[v])].to_double());
        for (int b = 0; b < n; ++b)
        {
            const Dyadic m = marginal(inst, b, x, mopt);
            if (!m.is_zero())
                out.residual.push_back(b);
            out.max_marginal = std::max(out.max_marginal, m.to_double());
        }
        const double slack = 1 + 1e-12;
        out.within_marginal_bound = out.max_marginal <= 2 * out.threshold * slack;
        if (out.max_marginal > factor * out.threshold * slack && out.max_marginal > 0 &&
            out.max_marginal > std::max(out.threshold, 0.0))
            throw PostconditionViolation("algorithm1_freeze: marginal " + std::to_string(out.max_marginal) +
                                         " exceeds threshold times the one-draw factor");
        if (inst.normal_form() && !out.within_marginal_bound)
            throw PostconditionViolation("algorithm1_freeze: marginal above 2 (e d)^8 p on a normal-form instance");
        return out;
    }

    inline FreezeResult algorithm1_freeze(const Instance& inst, std::uint64_t seed, const MarginalOptions& mopt = {})
    {
        return algorithm1_freeze(inst, sample(inst, seed), mopt);
    }

    // ---------------------------------------------------------------- fragility

    struct FragilityOptions
    {
        std::uint64_t cap = std::uint64_t{1} << 24; // scope-pair configurations times mixtures
    };

    namespace detail
    {
        /// Pr over X0, X1 that some mixture Z_a of them satisfies B, over the listed variables.
        inline Dyadic fragility_over(const Instance& inst, int b, std::span<const int> vars, const FragilityOptions& opt)
        {
            const auto& e = inst.event(b);
            std::vector<std::size_t> pos; // position of each scope variable in vars
            for (int v : e.scope)
                pos.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
            std::uint64_t pairs = 1;
            for (int v : vars)
            {
                const auto dom = static_cast<std::uint64_t>(inst.variable(v).domain());
                if (pairs > opt.cap / (dom * dom * 2))
                    throw CapacityError("fragility: event " + std::to_string(e.id) + " scope too large to enumerate");
                pairs *= dom * dom * 2;
            }
            const std::size_t k = vars.size();
            std::vector<int> x0(k, 0), x1(k, 0);
            Dyadic total;
            std::vector<int> z(e.scope.size());
            for (;;)
            {
                Dyadic w(1);
                for (std::size_t i = 0; i < k; ++i)
                {
                    const auto& wt = inst.variable(vars[i]).weights;
                    w = w * wt[static_cast<std::size_t>(x0[i])] * wt[static_cast<std::size_t>(x1[i])];
                }
                if (!w.is_zero())
                {
                    // Mixtures only matter on coordinates where the samples differ.
                    std::vector<std::size_t> differ;
                    for (std::size_t i = 0; i < k; ++i)
                        if (x0[i] != x1[i])
                            differ.push_back(i);
                    bool hit = false;
                    for (std::uint64_t a = 0; !hit && a < (std::uint64_t{1} << differ.size()); ++a)
                    {
                        std::vector<int> mix = x0;
                        for (std::size_t t = 0; t < differ.size(); ++t)
                            if ((a >> t) & 1U)
                                mix[differ[t]] = x1[differ[t]];
                        for (std::size_t s = 0; s < z.size(); ++s)
                            z[s] = mix[pos[s]];
                        hit = e.holds(z);
                    }
                    if (hit)
                        total += w;
                }
                std::size_t i = 0;
                for (; i < 2 * k; ++i)
                {
                    auto& val = i < k ? x0[i] : x1[i - k];
                    const int dom = inst.variable(vars[i < k ? i : i - k]).domain();
                    if (++val < dom)
                        break;
                    val = 0;
                }
                if (i == 2 * k)
                    break;
            }
            return total;
        }
    } // namespace detail

    /// f(B), exact, over the scope of B.
    inline Dyadic fragility_exact(const Instance& inst, int b, const FragilityOptions& opt = {})
    {
        return detail::fragility_over(inst, b, inst.event(b).scope, opt);
    }

    /// f(B) computed over the scope plus extra variables; the extra coordinates cannot change
    /// the value, which fragility_exact relies on.
    inline Dyadic fragility_with_extra(const Instance& inst, int b, std::span<const int> extra, const FragilityOptions& opt = {})
    {
        std::vector<int> vars = inst.event(b).scope;
        for (int v : extra)
            if (std::find(vars.begin(), vars.end(), v) == vars.end())
                vars.push_back(v);
        return detail::fragility_over(inst, b, vars, opt);
    }

    /// 2^s Pr(B) for an s-witnessable event.
    inline Dyadic fragility_witness_bound(const Instance& inst, int b, int s, const MarginalOptions& mopt = {})
    {
        return probability(inst, b, mopt) * Dyadic(BigInt(1) << s, 0);
    }

    /// (e^delta / (1+delta)^(1+delta))^(2 mu) for a deviation event with t >= 2 mu (1 + delta).
    inline double fragility_deviation_bound(double mu, double delta)
    {
        if (delta <= 0)
            throw PreconditionError("fragility_deviation_bound: delta must be positive");
        return std::exp(2 * mu * (delta - (1 + delta) * std::log1p(delta)));
    }

    struct FragilityExact
    {
    };
    struct FragilityWitness
    {
        int s = 0;
    };
    struct FragilityDeviation
    {
        double mu = 0;
        double delta = 0;
    };
    using FragilityMode = std::variant<FragilityExact, FragilityWitness, FragilityDeviation>;

    inline double fragility(const Instance& inst, int b, const FragilityMode& mode)
    {
        if (std::holds_alternative<FragilityExact>(mode))
            return fragility_exact(inst, b).to_double();
        if (const auto* w = std::get_if<FragilityWitness>(&mode))
            return fragility_witness_bound(inst, b, w->s).to_double();
        const auto& dv = std::get<FragilityDeviation>(mode);
        return fragility_deviation_bound(dv.mu, dv.delta);
    }

    // ---------------------------------------------------------------- Algorithm 2 (dangerous events)

    struct DangerOptions
    {
        int neighborhood_cap = 20;
        MarginalOptions marginal{};
    };

    struct DangerResult
    {
        bool dangerous = false;
        std::vector<int> witness; // U subset of N(B)
        Dyadic marginal;          // marginal under the witnessing reversion (max found if not dangerous)
        std::size_t patterns = 0; // distinct reversions of S_B examined
    };

    /// Whether some U subset of N(B) has marginal(B, reversion of x wrt U) >= q. Every subset is
    /// covered; subsets that revert the same part of S_B are evaluated once.
    inline DangerResult is_dangerous(const Instance& inst, int b, std::span<const int> x, double q, const DangerOptions& opt = {})
    {
        if (!is_total(x))
            throw PreconditionError("is_dangerous: x must be total");
        const auto nb = inst.neighborhood(b);
        if (static_cast<int>(nb.size()) > opt.neighborhood_cap)
            throw CapacityError("is_dangerous: event " + std::to_string(inst.event(b).id) + " has " +
                                std::to_string(nb.size()) + " neighbors, cap " + std::to_string(opt.neighborhood_cap));
        const auto& scope = inst.event(b).scope;
        // Mask over S_B reverted by each neighbor.
        std::vector<std::vector<bool>> mask;
        for (int a : nb)
        {
            std::vector<bool> m(scope.size(), false);
            const auto& sa = inst.event(a).scope;
            for (std::size_t i = 0; i < scope.size(); ++i)
                m[i] = std::find(sa.begin(), sa.end(), scope[i]) != sa.end();
            mask.push_back(std::move(m));
        }
        // Unions of masks over all subsets, each with the first subset (by inclusion order) reaching it.
        std::map<std::vector<bool>, std::vector<int>> reach{{std::vector<bool>(scope.size(), false), {}}};
        for (std::size_t i = 0; i < nb.size(); ++i)
        {
            std::vector<std::pair<std::vector<bool>, std::vector<int>>> add;
            for (const auto& [pat, subset] : reach)
            {
                std::vector<bool> u = pat;
                for (std::size_t t = 0; t < u.size(); ++t)
                    u[t] = u[t] || mask[i][t];
                if (!reach.count(u))
                {
                    auto s = subset;
                    s.push_back(nb[i]);
                    add.emplace_back(std::move(u), std::move(s));
                }
            }
            for (auto& [u, s] : add)
                reach.emplace(std::move(u), std::move(s));
        }
        DangerResult res;
        res.patterns = reach.size();
        Assignment y(x.begin(), x.end());
        for (const auto& [pat, subset] : reach)
        {
            for (std::size_t i = 0; i < scope.size(); ++i)
                y[static_cast<std::size_t>(scope[i])] = pat[i] ? kStar : x[static_cast<std::size_t>(scope[i])];
            const Dyadic m = marginal(inst, b, y, opt.marginal);
            if (m.to_double() >= q)
            {
                res.dangerous = true;
                res.witness = subset;
                res.marginal = m;
                return res;
            }
            res.marginal = std::max(res.marginal, m);
        }
        return res;
    }

    struct Alg2Result
    {
        Assignment sample;         // X
        Assignment partial;        // Y
        std::vector<int> dangerous; // M
        std::vector<int> residual;  // events with a neighbor in M
        double q = 0;
    };

    inline double danger_threshold(int d) { return std::pow(std::numbers::e * d, -3); }

    inline Alg2Result algorithm2_dangerous(const Instance& inst, const Assignment& x, const DangerOptions& opt = {})
    {
        if (x.size() != inst.var_count() || !is_total(x))
            throw PreconditionError("algorithm2_dangerous: sample must be total");
        Alg2Result out;
        out.sample = x;
        out.partial = x;
        out.q = danger_threshold(inst.d());
        const int n = static_cast<int>(inst.event_count());
        std::vector<char> in_m(static_cast<std::size_t>(n), 0);
        for (int b = 0; b < n; ++b)
            if (is_dangerous(inst, b, x, out.q, opt).dangerous)
            {
                out.dangerous.push_back(b);
                in_m[static_cast<std::size_t>(b)] = 1;
                for (int v : inst.event(b).scope)
                    out.partial[static_cast<std::size_t>(v)] = kStar;
            }
        for (int b = 0; b < n; ++b)
        {
            bool hit = in_m[static_cast<std::size_t>(b)] != 0;
            for (int a : inst.dependency().neighbors(b))
                hit = hit || in_m[static_cast<std::size_t>(a)];
            if (hit)
                out.residual.push_back(b);
        }
        return out;
    }

    inline Alg2Result algorithm2_dangerous(const Instance& inst, std::uint64_t seed, const DangerOptions& opt = {})
    {
        return algorithm2_dangerous(inst, sample(inst, seed), opt);
    }

    // ---------------------------------------------------------------- shattering

    enum class ShatterBackend
    {
        Exhaustive,
        MT,
        DerandomizedMT,
    };

    inline std::string to_string(ShatterBackend b)
    {
        switch (b)
        {
        case ShatterBackend::Exhaustive:
            return "exhaustive";
        case ShatterBackend::MT:
            return "mt";
        case ShatterBackend::DerandomizedMT:
            return "derandomized-mt";
        }
        return "?";
    }

    struct ShatterOptions
    {
        ShatterBackend backend = ShatterBackend::Exhaustive;
        std::uint64_t search_budget = std::uint64_t{1} << 22; // backtracking nodes per component
        std::size_t mt_max_steps = 100'000;
        std::uint64_t seed = 0;
        int workers = 1;
        MarginalOptions marginal{};
    };

    struct ComponentReport
    {
        std::vector<int> events;
        std::vector<int> star_vars;
        bool solved = false;
        std::size_t work = 0; // search nodes, MT resamplings, or derandomizer steps
        std::optional<Dyadic> initial_expectation; // derandomized backend
    };

    struct ShatterResult
    {
        Assignment assignment;
        bool solved = false;
        std::vector<ComponentReport> components;
        std::size_t filled_free = 0; // undetermined variables outside every residual scope
        std::vector<int> violated;   // events of the whole instance still true (empty when solved)
    };

    namespace detail
    {
        /// The trivial one-round residual solver on one component: each event owns the
        /// undetermined variables it is the lowest-index holder of and draws them from its
        /// tape; an event flags when it holds.
        class ComponentDraw final : public LocalAlgorithm<NoInput, char>
        {
        public:
            ComponentDraw(const Instance& inst, const Assignment& partial, std::vector<int> events, const MarginalOptions& mopt)
                : inst_(inst), partial_(partial), events_(std::move(events)), mopt_(mopt)
            {
                for (std::size_t i = 0; i < events_.size(); ++i)
                    local_[events_[i]] = static_cast<int>(i);
                bits_.assign(events_.size(), 0);
                for (std::size_t i = 0; i < events_.size(); ++i)
                    for (int v : inst_.event(events_[i]).scope)
                    {
                        if (partial_[static_cast<std::size_t>(v)] != kStar || owner_.count(v))
                            continue;
                        owner_[v] = {static_cast<int>(i), bits_[i]};
                        const unsigned w = draw_bits(inst_.variable(v));
                        if (w > 62)
                            throw PreconditionError("derandomized residual: weights finer than 2^-62");
                        bits_[i] += static_cast<int>(w);
                    }
                fair_ = true;
                const Dyadic half = Dyadic::pow2_inverse(1);
                for (const auto& [v, o] : owner_)
                {
                    const auto& var = inst_.variable(v);
                    fair_ = fair_ && var.domain() == 2 && var.weights[0] == half && var.weights[1] == half;
                }
            }

            std::string name() const override { return "residual-draw"; }
            int radius() const override { return 1; }
            std::vector<int> tape_layout(const Graph&) const override { return bits_; }

            NodeResult<char> compute(const LocalView<NoInput>& view) const override
            {
                const int c = view.center();
                const auto& e = inst_.event(events_[static_cast<std::size_t>(c)]);
                std::vector<int> vals;
                for (int v : e.scope)
                {
                    const int fixed = partial_[static_cast<std::size_t>(v)];
                    if (fixed != kStar)
                    {
                        vals.push_back(fixed);
                        continue;
                    }
                    const auto& [node, first] = owner_.at(v);
                    const unsigned w = draw_bits(inst_.variable(v));
                    vals.push_back(value_from_bits(inst_.variable(v), view.bits_value(node, first, static_cast<int>(w)), w));
                }
                const bool bad = e.holds(vals);
                return {static_cast<char>(bad), bad};
            }

            /// For fair-coin variables a partially fixed tape is exactly a partial assignment.
            std::optional<Dyadic> exact_flag_expectation(const LocalView<NoInput>& view) const override
            {
                if (!fair_)
                    return std::nullopt;
                const int c = view.center();
                const int b = events_[static_cast<std::size_t>(c)];
                Assignment y = partial_;
                for (int v : inst_.event(b).scope)
                    if (y[static_cast<std::size_t>(v)] == kStar)
                    {
                        const auto& [node, first] = owner_.at(v);
                        const auto cell = view.cell(node, first);
                        y[static_cast<std::size_t>(v)] = cell == kUnfixed ? kStar : value_from_bits(inst_.variable(v), static_cast<std::uint64_t>(cell), 1);
                    }
                return marginal(inst_, b, y, mopt_);
            }

            /// Decoded values of the component's undetermined variables.
            std::map<int, int> decode(const TapeAssignment& tapes) const
            {
                std::map<int, int> out;
                for (const auto& [v, o] : owner_)
                {
                    const unsigned w = draw_bits(inst_.variable(v));
                    std::uint64_t u = 0;
                    for (unsigned j = 0; j < w; ++j)
                        u = (u << 1) | static_cast<std::uint64_t>(tapes.get(o.first, o.second + static_cast<int>(j)));
                    out[v] = value_from_bits(inst_.variable(v), u, w);
                }
                return out;
            }

        private:
            const Instance& inst_;
            const Assignment& partial_;
            std::vector<int> events_;
            MarginalOptions mopt_;
            std::map<int, int> local_;
            std::map<int, std::pair<int, int>> owner_; // variable -> (local node, first bit)
            std::vector<int> bits_;
            bool fair_ = true;
        };

        /// Complete backtracking search over the component's undetermined variables.
        inline bool search_component(const Instance& inst, Assignment& x, const std::vector<int>& events,
                                     const std::vector<int>& vars, std::uint64_t budget, std::size_t& nodes, long long comp_id)
        {
            // Events become checkable once their last undetermined variable is set.
            std::vector<std::vector<int>> ready(vars.size() + 1);
            std::map<int, std::size_t> pos;
            for (std::size_t i = 0; i < vars.size(); ++i)
                pos[vars[i]] = i + 1;
            for (int b : events)
            {
                std::size_t last = 0;
                for (int v : inst.event(b).scope)
                    if (auto it = pos.find(v); it != pos.end())
                        last = std::max(last, it->second);
                ready[last].push_back(b);
            }
            for (int b : ready[0])
                if (holds(inst, b, x))
                    return false;
            std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
                if (i == vars.size())
                    return true;
                const int v = vars[i];
                const auto& var = inst.variable(v);
                for (int val = 0; val < var.domain(); ++val)
                {
                    if (var.weights[static_cast<std::size_t>(val)].is_zero())
                        continue;
                    if (++nodes > budget)
                        throw CapacityError("shattering_solve: component " + std::to_string(comp_id) + " (" +
                                            std::to_string(events.size()) + " events, " + std::to_string(vars.size()) +
                                            " free variables) exceeds the search budget");
                    x[static_cast<std::size_t>(v)] = val;
                    bool ok = true;
                    for (int b : ready[i + 1])
                        if (holds(inst, b, x))
                        {
                            ok = false;
                            break;
                        }
                    if (ok && go(i + 1))
                        return true;
                }
                x[static_cast<std::size_t>(v)] = kStar;
                return false;
            };
            return go(0);
        }
    } // namespace detail

    /// Solves the residual events component by component, filling only undetermined
    /// variables. Components of the dependency graph induced on the residual set share no
    /// undetermined variable, so they are independent.
    inline ShatterResult shattering_solve(const Instance& inst, std::span<const int> residual, const Assignment& partial,
                                          const ShatterOptions& opt = {})
    {
        if (partial.size() != inst.var_count())
            throw PreconditionError("shattering_solve: partial assignment has the wrong length");
        ShatterResult out;
        out.assignment = partial;
        const auto parts = components(inst.dependency(), residual);
        out.components.resize(parts.size());

        std::vector<Assignment> local(parts.size());
        parallel_for(parts.size(), opt.workers, [&](std::size_t c) {
            auto& rep = out.components[c];
            rep.events = parts.parts[c];
            std::set<int> vs;
            for (int b : rep.events)
                for (int v : inst.event(b).scope)
                    if (partial[static_cast<std::size_t>(v)] == kStar)
                        vs.insert(v);
            rep.star_vars.assign(vs.begin(), vs.end());
            Assignment x = partial;
            const long long comp_id = static_cast<long long>(c);
            switch (opt.backend)
            {
            case ShatterBackend::Exhaustive: {
                rep.solved = detail::search_component(inst, x, rep.events, rep.star_vars, opt.search_budget, rep.work, comp_id);
                break;
            }
            case ShatterBackend::MT: {
                // MT over the component's events only: a sub-instance view via resamplable mask.
                for (int v : rep.star_vars)
                {
                    Rng rng(stream_seed(opt.seed, static_cast<std::uint64_t>(v), 0x5b1));
                    x[static_cast<std::size_t>(v)] = draw(inst.variable(v), rng);
                }
                std::vector<char> mask(inst.var_count(), 0);
                for (int v : rep.star_vars)
                    mask[static_cast<std::size_t>(v)] = 1;
                // Fill the other undetermined variables temporarily so events can be evaluated;
                // only this component's variables are copied back.
                for (std::size_t v = 0; v < x.size(); ++v)
                    if (x[v] == kStar)
                        x[v] = 0;
                std::vector<Event> evs;
                std::vector<int> comp_events = rep.events;
                const auto sub = [&] {
                    for (int b : comp_events)
                        evs.push_back(inst.event(b));
                    return Instance(inst.variables(), std::move(evs));
                }();
                MTOptions mo;
                mo.max_steps = opt.mt_max_steps;
                const auto r = moser_tardos(sub, stream_seed(opt.seed, c, 0x5b2), mo, &x, mask);
                rep.solved = r.solved;
                rep.work = r.steps;
                x = r.assignment;
                break;
            }
            case ShatterBackend::DerandomizedMT: {
                const Graph g = induced_subgraph(inst.dependency(), rep.events);
                const detail::ComponentDraw alg(inst, partial, rep.events, opt.marginal);
                const auto in = no_inputs(g);
                const auto res = derandomize(alg, g, std::span<const NoInput>(in), identity_order(g.n()));
                rep.initial_expectation = res.initial_expectation;
                rep.work = res.trace.size();
                rep.solved = res.run.total_flags == 0;
                for (const auto& [v, val] : alg.decode(res.tapes))
                    x[static_cast<std::size_t>(v)] = val;
                break;
            }
            }
            local[c] = std::move(x);
        });

        for (std::size_t c = 0; c < parts.size(); ++c)
            for (int v : out.components[c].star_vars)
                out.assignment[static_cast<std::size_t>(v)] =
                    out.components[c].solved ? local[c][static_cast<std::size_t>(v)] : kStar;

        // Undetermined variables outside every residual scope only touch zero-marginal events.
        for (std::size_t v = 0; v < out.assignment.size(); ++v)
            if (out.assignment[v] == kStar)
            {
                bool in_unsolved = false;
                for (const auto& rep : out.components)
                    in_unsolved = in_unsolved || (!rep.solved && std::binary_search(rep.star_vars.begin(), rep.star_vars.end(), static_cast<int>(v)));
                const auto& w = inst.variables()[v].weights;
                int val = 0;
                while (w[static_cast<std::size_t>(val)].is_zero())
                    ++val;
                out.assignment[v] = val;
                if (!in_unsolved)
                    ++out.filled_free;
            }

        for (std::size_t v = 0; v < partial.size(); ++v)
            if (partial[v] != kStar && out.assignment[v] != partial[v])
                throw PostconditionViolation("shattering_solve: a determined variable was changed");
        out.violated = violated_events(inst, out.assignment);
        out.solved = std::all_of(out.components.begin(), out.components.end(), [](const ComponentReport& r) { return r.solved; });
        if (out.solved && !out.violated.empty())
            throw PostconditionViolation("shattering_solve: solved components but event " +
                                         std::to_string(inst.event(out.violated.front()).id) + " still holds");
        return out;
    }

    /// Sizes of the connected components of the dependency graph induced on `residual`.
    inline std::vector<int> residual_component_sizes(const Instance& inst, std::span<const int> residual)
    {
        std::vector<int> out;
        for (const auto& p : components(inst.dependency(), residual).parts)
            out.push_back(static_cast<int>(p.size()));
        return out;
    }

    /// (e Delta)^(-w / (Delta+1)^c + 1).
    inline double component_tail_bound(int max_degree, int c, double w)
    {
        const double D = std::max(max_degree, 1);
        return std::pow(std::numbers::e * D, -w / std::pow(max_degree + 1.0, c) + 1);
    }

    // ---------------------------------------------------------------- bootstrapping

    /// A randomized LLL algorithm: total assignment (possibly violating events) from a seed.
    struct LLLAlgorithm
    {
        std::string name;
        int radius = 1;
        std::function<Assignment(const Instance&, std::uint64_t)> run;
    };

    /// Second-stage solver: repairs `start` given the events it violates.
    using Repair = std::function<Assignment(const Instance&, const Assignment& start, std::span<const int> failed, std::uint64_t seed)>;

    struct BootstrapResult
    {
        Assignment assignment;
        std::vector<int> failed_first; // C = events still true after the first algorithm
        double p_prime = 0;            // rho
        double d_prime = 0;            // d^(2r)
        bool second_invoked = false;
        bool solved = false;
    };

    inline BootstrapResult bootstrap_compose(const Instance& inst, const LLLAlgorithm& first, double rho, const Repair& second,
                                             std::uint64_t seed)
    {
        if (rho < 0 || rho > 1)
            throw PreconditionError("bootstrap_compose: rho must be a probability");
        BootstrapResult out;
        out.p_prime = rho;
        out.d_prime = std::pow(static_cast<double>(inst.d()), 2.0 * first.radius);
        out.assignment = first.run(inst, stream_seed(seed, 1));
        out.failed_first = violated_events(inst, out.assignment);
        if (!out.failed_first.empty())
        {
            out.second_invoked = true;
            out.assignment = second(inst, out.assignment, out.failed_first, stream_seed(seed, 2));
        }
        out.solved = violated_events(inst, out.assignment).empty();
        return out;
    }

    /// Moser-Tardos started from the first stage's output.
    inline Repair mt_repair(MTOptions opt = {})
    {
        return [opt](const Instance& inst, const Assignment& start, std::span<const int>, std::uint64_t seed) {
            return moser_tardos(inst, seed, opt, &start).assignment;
        };
    }

    /// Algorithm 1 followed by one unchecked draw of every undetermined variable from the same
    /// sample: a radius-O(d^2) algorithm whose local failures are the residual events left unsolved.
    inline LLLAlgorithm algorithm1_with_draw()
    {
        return LLLAlgorithm{"alg1+draw", 2, [](const Instance& inst, std::uint64_t seed) {
                                const auto src = sample(inst, seed);
                                auto fr = algorithm1_freeze(inst, src);
                                for (std::size_t v = 0; v < fr.partial.size(); ++v)
                                    if (fr.partial[v] == kStar)
                                        fr.partial[v] = src[v];
                                return fr.partial;
                            }};
    }

    struct FakeSizeCheck
    {
        double growth = 0; // d^r(w)
        double w = 0;
        double local_failure_bound = 0; // 2 / w
    };

    /// Running an algorithm with fake size w: admissible when d^r(w) <= w, and then its local
    /// failure probability is at most 2/w.
    inline FakeSizeCheck check_fake_size(double d, int radius_at_w, double w)
    {
        FakeSizeCheck c{std::pow(d, radius_at_w), w, 2.0 / w};
        if (c.growth > w)
            throw BootstrapInfeasible("fake size " + std::to_string(w) + " too small: d^r = " + std::to_string(c.growth));
        return c;
    }

    // ---------------------------------------------------------------- normal form

    struct NormalFormRewrite
    {
        Instance instance;
        std::vector<std::vector<int>> bits_of; // original variable -> its coin variables, MSB first
    };

    /// Replaces every variable with a uniform distribution over 2^b values by b fair coins.
    inline NormalFormRewrite to_normal_form(const Instance& inst)
    {
        NormalFormRewrite out;
        std::vector<Variable> coins;
        for (const auto& v : inst.variables())
        {
            const int dom = v.domain();
            int b = 0;
            while ((1 << b) < dom)
                ++b;
            if ((1 << b) != dom)
                throw PreconditionError("to_normal_form: variable " + std::to_string(v.id) + " domain is not a power of two");
            for (const auto& w : v.weights)
                if (w != Dyadic::pow2_inverse(static_cast<unsigned>(b)))
                    throw PreconditionError("to_normal_form: variable " + std::to_string(v.id) + " is not uniform");
            std::vector<int> ids;
            for (int j = 0; j < b; ++j)
            {
                ids.push_back(static_cast<int>(coins.size()));
                coins.push_back(fair_coin(static_cast<long long>(coins.size())));
            }
            out.bits_of.push_back(std::move(ids));
        }
        std::vector<Event> evs;
        for (const auto& e : inst.events())
        {
            Event ne;
            ne.id = e.id;
            std::vector<int> widths;
            for (int v : e.scope)
            {
                const auto& bs = out.bits_of[static_cast<std::size_t>(v)];
                widths.push_back(static_cast<int>(bs.size()));
                ne.scope.insert(ne.scope.end(), bs.begin(), bs.end());
            }
            ne.holds = [pred = e.holds, widths](std::span<const int> bits) {
                std::vector<int> vals;
                std::size_t k = 0;
                for (int w : widths)
                {
                    int x = 0;
                    for (int j = 0; j < w; ++j)
                        x = (x << 1) | bits[k++];
                    vals.push_back(x);
                }
                return pred(vals);
            };
            evs.push_back(std::move(ne));
        }
        out.instance = Instance(std::move(coins), std::move(evs));
        return out;
    }

    inline Assignment from_normal_form(const NormalFormRewrite& nf, std::span<const int> coins)
    {
        Assignment x;
        for (const auto& bs : nf.bits_of)
        {
            int v = 0;
            for (int c : bs)
                v = (v << 1) | coins[static_cast<std::size_t>(c)];
            x.push_back(v);
        }
        return x;
    }

    // ---------------------------------------------------------------- k-SAT helpers and I/O

    inline Instance cnf_instance(int vars, const std::vector<std::vector<Literal>>& clauses)
    {
        std::vector<Variable> vs;
        for (int i = 0; i < vars; ++i)
            vs.push_back(fair_coin(i + 1));
        std::vector<Event> es;
        for (std::size_t c = 0; c < clauses.size(); ++c)
            es.push_back(make_clause_event(static_cast<long long>(c), clauses[c], vs));
        return Instance(std::move(vs), std::move(es));
    }

    /// m clauses of width k in a chain: consecutive clauses share `overlap` variables, so each
    /// clause meets only its two neighbors (d = 3) when 2 * overlap <= k.
    inline Instance ksat_chain(int m, int k, int overlap, std::uint64_t seed)
    {
        if (k < 1 || overlap < 0 || 2 * overlap > k || m < 0)
            throw GeneratorError("ksat_chain: need 0 <= 2 * overlap <= k");
        Rng rng(stream_seed(seed, 0xc4a1));
        const int step = k - overlap;
        std::vector<std::vector<Literal>> cls;
        for (int c = 0; c < m; ++c)
        {
            std::vector<Literal> lits;
            for (int j = 0; j < k; ++j)
                lits.push_back({c * step + j, rng.coin()});
            cls.push_back(std::move(lits));
        }
        const int vars = m == 0 ? 0 : (m - 1) * step + k;
        return cnf_instance(vars, cls);
    }

    /// Random k-CNF over `vars` variables where no variable occurs in more than `max_occ`
    /// clauses; clause degree is then at most k (max_occ - 1). Unplaceable clauses are dropped.
    inline Instance random_ksat_bounded(int vars, int m, int k, int max_occ, std::uint64_t seed)
    {
        if (k < 1 || k > vars || max_occ < 1)
            throw GeneratorError("random_ksat_bounded: infeasible parameters");
        Rng rng(stream_seed(seed, 0xc4a2));
        std::vector<int> occ(static_cast<std::size_t>(vars), 0);
        std::vector<std::vector<Literal>> cls;
        for (int c = 0; c < m; ++c)
        {
            std::vector<int> avail;
            for (int v = 0; v < vars; ++v)
                if (occ[static_cast<std::size_t>(v)] < max_occ)
                    avail.push_back(v);
            if (static_cast<int>(avail.size()) < k)
                break;
            for (int j = 0; j < k; ++j)
            {
                const auto pick = j + static_cast<int>(rng.uniform_below(avail.size() - static_cast<std::size_t>(j)));
                std::swap(avail[static_cast<std::size_t>(j)], avail[static_cast<std::size_t>(pick)]);
            }
            std::vector<Literal> lits;
            for (int j = 0; j < k; ++j)
            {
                const int v = avail[static_cast<std::size_t>(j)];
                ++occ[static_cast<std::size_t>(v)];
                lits.push_back({v, rng.coin()});
            }
            cls.push_back(std::move(lits));
        }
        return cnf_instance(vars, cls);
    }

    inline bool satisfies(const Instance& inst, std::span<const int> x) { return is_total(x) && violated_events(inst, x).empty(); }

    namespace detail
    {
        inline std::string strip_comment(std::string line, char mark)
        {
            if (auto pos = line.find(mark); pos != std::string::npos)
                line.erase(pos);
            return line;
        }

        /// "a", "a/b" with b a power of two, or "a/2^e".
        inline Dyadic parse_dyadic(const std::string& tok, int lineno)
        {
            auto fail = [&] { return MalformedInput("line " + std::to_string(lineno) + ": bad weight '" + tok + "'"); };
            try
            {
                const auto slash = tok.find('/');
                if (slash == std::string::npos)
                    return Dyadic(std::stoll(tok));
                const long long num = std::stoll(tok.substr(0, slash));
                const std::string den = tok.substr(slash + 1);
                if (den.rfind("2^", 0) == 0)
                    return Dyadic(BigInt(num), static_cast<unsigned>(std::stoul(den.substr(2))));
                const unsigned long long d = std::stoull(den);
                if (d == 0 || (d & (d - 1)) != 0)
                    throw fail();
                unsigned e = 0;
                while ((1ULL << e) < d)
                    ++e;
                return Dyadic(BigInt(num), e);
            }
            catch (const MalformedInput&)
            {
                throw;
            }
            catch (const std::exception&)
            {
                throw fail();
            }
        }
    } // namespace detail

    /// Text format, one declaration per line ('#' comments):
    ///   var <id> <w_0> ... <w_{k-1}>        dyadic weights, domain size k
    ///   clause <id> <lit> ...               literal = variable id, '-' prefix negates
    ///   table <id> <var id> ... : <0/1 string over the scope's joint values>
    inline Instance parse_instance(std::istream& in)
    {
        std::vector<Variable> vars;
        std::map<long long, int> var_index;
        std::vector<Event> events;
        std::set<long long> event_ids;
        std::string raw;
        int lineno = 0;
        auto lookup = [&](long long id, int ln) {
            auto it = var_index.find(id);
            if (it == var_index.end())
                throw MalformedInput("line " + std::to_string(ln) + ": unknown variable " + std::to_string(id));
            return it->second;
        };
        while (std::getline(in, raw))
        {
            ++lineno;
            std::istringstream ls(detail::strip_comment(raw, '#'));
            std::string kind;
            if (!(ls >> kind))
                continue;
            long long id = 0;
            if (!(ls >> id))
                throw MalformedInput("line " + std::to_string(lineno) + ": missing id");
            if (kind == "var")
            {
                if (var_index.count(id))
                    throw MalformedInput("line " + std::to_string(lineno) + ": duplicate variable " + std::to_string(id));
                Variable v{id, {}};
                std::string tok;
                while (ls >> tok)
                    v.weights.push_back(detail::parse_dyadic(tok, lineno));
                Dyadic s;
                for (const auto& w : v.weights)
                    s += w;
                if (v.weights.empty() || s != Dyadic(1))
                    throw MalformedInput("line " + std::to_string(lineno) + ": weights of variable " + std::to_string(id) +
                                         " must sum to 1");
                var_index[id] = static_cast<int>(vars.size());
                vars.push_back(std::move(v));
                continue;
            }
            if (!event_ids.insert(id).second)
                throw MalformedInput("line " + std::to_string(lineno) + ": duplicate event " + std::to_string(id));
            if (kind == "clause")
            {
                std::vector<Literal> lits;
                std::string tok;
                while (ls >> tok)
                {
                    const bool neg = tok.front() == '-';
                    long long vid = 0;
                    try
                    {
                        vid = std::stoll(neg ? tok.substr(1) : tok);
                    }
                    catch (const std::exception&)
                    {
                        throw MalformedInput("line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
                    }
                    lits.push_back({lookup(vid, lineno), !neg});
                }
                if (lits.empty())
                    throw MalformedInput("line " + std::to_string(lineno) + ": empty clause");
                events.push_back(make_clause_event(id, std::move(lits), vars));
            }
            else if (kind == "table")
            {
                std::vector<int> scope;
                std::string tok;
                while (ls >> tok && tok != ":")
                {
                    try
                    {
                        scope.push_back(lookup(std::stoll(tok), lineno));
                    }
                    catch (const MalformedInput&)
                    {
                        throw;
                    }
                    catch (const std::exception&)
                    {
                        throw MalformedInput("line " + std::to_string(lineno) + ": bad scope entry '" + tok + "'");
                    }
                }
                std::string bits;
                if (tok != ":" || !(ls >> bits))
                    throw MalformedInput("line " + std::to_string(lineno) + ": table needs ': <bits>'");
                std::vector<char> table;
                for (char ch : bits)
                {
                    if (ch != '0' && ch != '1')
                        throw MalformedInput("line " + std::to_string(lineno) + ": table entries must be 0 or 1");
                    table.push_back(static_cast<char>(ch - '0'));
                }
                events.push_back(make_table_event(id, std::move(scope), std::move(table), vars));
            }
            else
                throw MalformedInput("line " + std::to_string(lineno) + ": unknown declaration '" + kind + "'");
        }
        return Instance(std::move(vars), std::move(events));
    }

    /// DIMACS CNF; variables are fair coins, one bad event per clause.
    inline Instance parse_dimacs(std::istream& in)
    {
        std::string raw;
        int lineno = 0;
        long long nv = -1, nc = -1;
        std::vector<std::vector<Literal>> clauses;
        std::vector<Literal> cur;
        while (std::getline(in, raw))
        {
            ++lineno;
            std::istringstream ls(raw);
            std::string first;
            if (!(ls >> first) || first == "c" || first[0] == 'c' || first[0] == '%')
                continue;
            if (first == "p")
            {
                std::string fmt;
                if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
                    throw MalformedInput("line " + std::to_string(lineno) + ": bad problem line");
                continue;
            }
            if (nv < 0)
                throw MalformedInput("line " + std::to_string(lineno) + ": clause before problem line");
            std::istringstream all(raw);
            long long lit = 0;
            std::string tok;
            while (all >> tok)
            {
                try
                {
                    lit = std::stoll(tok);
                }
                catch (const std::exception&)
                {
                    throw MalformedInput("line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
                }
                if (lit == 0)
                {
                    clauses.push_back(std::move(cur));
                    cur.clear();
                    continue;
                }
                const long long v = lit < 0 ? -lit : lit;
                if (v > nv)
                    throw MalformedInput("line " + std::to_string(lineno) + ": variable " + std::to_string(v) + " out of range");
                cur.push_back({static_cast<int>(v - 1), lit > 0});
            }
        }
        if (nv < 0)
            throw MalformedInput("dimacs: missing problem line");
        if (!cur.empty())
            clauses.push_back(std::move(cur));
        if (static_cast<long long>(clauses.size()) != nc)
            throw MalformedInput("dimacs: expected " + std::to_string(nc) + " clauses, found " + std::to_string(clauses.size()));
        for (auto& c : clauses)
        {
            // Duplicate literals collapse; a tautology can never be violated and is dropped.
            std::sort(c.begin(), c.end(), [](const Literal& a, const Literal& b) {
                return a.var != b.var ? a.var < b.var : a.positive < b.positive;
            });
            c.erase(std::unique(c.begin(), c.end()), c.end());
        }
        std::vector<std::vector<Literal>> kept;
        for (auto& c : clauses)
        {
            bool taut = false;
            for (std::size_t i = 1; i < c.size(); ++i)
                taut = taut || c[i].var == c[i - 1].var;
            if (c.empty())
                throw MalformedInput("dimacs: empty clause");
            if (!taut)
                kept.push_back(std::move(c));
        }
        return cnf_instance(static_cast<int>(nv), kept);
    }

    inline void write_dimacs(std::ostream& out, const Instance& inst)
    {
        if (!inst.is_cnf())
            throw PreconditionError("write_dimacs: instance has non-clause events");
        out << "p cnf " << inst.var_count() << ' ' << inst.event_count() << '\n';
        for (const auto& e : inst.events())
        {
            for (const auto& l : e.clause)
                out << (l.positive ? "" : "-") << (l.var + 1) << ' ';
            out << "0\n";
        }
    }

} // namespace dlocal::lll
