// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "dlocal/applications.hpp"
#include "dlocal/decomposition.hpp"
#include "dlocal/derandomize.hpp"
#include "dlocal/generators.hpp"
#include "dlocal/hypergraph_matching.hpp"
#include "dlocal/lll.hpp"
#include "dlocal/slocal_algorithms.hpp"

#include "../unit/test_algorithms.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>

using namespace dlocal;

namespace
{
    // Tolerances and sizes, pinned.
    constexpr double kSigmas = 3.0;
    constexpr double kSoundnessBudgetSeconds = 300.0;
    constexpr int kPerturbations = 100;
    constexpr int kMatchingInstances = 50;
    constexpr std::size_t kSplitTrials = 10'000;
    constexpr int kLllSeeds = 50;
    constexpr int kDangerSamples = 10'000;
    constexpr int kTailSeeds = 1'000;
    constexpr int kCompilerPairs = 20;
    constexpr double kRoundConstant = 1.0; // rounds <= a (d+1) c r with a = 1
    constexpr int kSinklessGraphs = 30;
    constexpr int kSinklessSeeds = 20;

    struct Verdict
    {
        bool pass = true;
        std::ostringstream detail;

        void require(bool ok, const std::string& what)
        {
            if (!ok && pass)
                detail << "first failure: " << what << "; ";
            pass = pass && ok;
        }
    };

    std::vector<int> shuffled(int n, std::uint64_t seed)
    {
        auto o = identity_order(n);
        Rng rng(seed);
        gen::shuffle(o, rng);
        return o;
    }

    template <class Out>
    bool trace_sound(const DerandomizationResult<Out>& r, std::string& why)
    {
        Dyadic prev = r.initial_expectation;
        for (const auto& t : r.trace)
        {
            if (t.before != prev)
            {
                why = "step " + std::to_string(t.step) + " starts at " + t.before.str() + " after " + prev.str();
                return false;
            }
            if (t.after > t.before)
            {
                why = "step " + std::to_string(t.step) + " increases";
                return false;
            }
            prev = t.after;
        }
        if (r.final_expectation != prev || prev != Dyadic(r.run.total_flags))
        {
            why = "final " + prev.str() + " vs realized " + std::to_string(r.run.total_flags);
            return false;
        }
        if (r.initial_expectation < Dyadic(1) && r.run.total_flags != 0)
        {
            why = "initial below one but flags remain";
            return false;
        }
        return true;
    }

    // ------------------------------------------------------------------ 1

    Verdict derandomizer_soundness()
    {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        const OracleConfig enumerate{OracleMode::Enumerate, std::uint64_t{1} << 20};
        DerandomizeOptions opt;
        opt.oracle = enumerate;
        int instances = 0, below_one = 0;
        std::string why;

        // Trivial Las Vegas algorithms.
        for (std::uint64_t s = 0; s < 6; ++s)
        {
            const Graph g = s < 3 ? gen::gnm(24, 20 + s * 3, s) : gen::cycle(12 + static_cast<int>(s));
            const testing_algos::RandomColoring a(s < 3 ? 3 : 6);
            const auto in = no_inputs(g);
            const auto r = derandomize(a, g, std::span<const NoInput>(in), shuffled(g.n(), s), opt);
            v.require(trace_sound(r, why), "random coloring seed " + std::to_string(s) + ": " + why);
            v.require(run_local(a, g, std::span<const NoInput>(in), r.tapes) == r.run, "random coloring replay");
            below_one += r.initial_expectation < Dyadic(1);
            ++instances;
        }
        for (int n : {1, 3, 8})
        {
            const Graph g = gen::cycle(std::max(n, 3));
            const testing_algos::QuarterCoin a;
            const auto in = no_inputs(g);
            const auto r = derandomize(a, g, std::span<const NoInput>(in), identity_order(g.n()), opt);
            v.require(trace_sound(r, why), "quarter coin: " + why);
            below_one += r.initial_expectation < Dyadic(1);
            ++instances;
        }

        // Linial-Saks phases.
        for (std::uint64_t s = 0; s < 6; ++s)
        {
            // Radius-2 phases keep every window small enough to enumerate.
            const Graph g = s < 2 ? gen::gnm(16, 16, s) : s < 4 ? gen::random_tree(20, s) : gen::cycle(10 + static_cast<int>(s));
            std::vector<char> remaining(static_cast<std::size_t>(g.n()), 1);
            const LinialSaksPhase a(2, remaining);
            const auto r = derandomize(a, g, std::span<const char>(remaining), shuffled(g.n(), 100 + s), opt);
            v.require(trace_sound(r, why), "linial-saks phase seed " + std::to_string(s) + ": " + why);
            below_one += r.initial_expectation < Dyadic(1);
            ++instances;
        }

        // Degree splitting through the general derandomizer.
        for (std::uint64_t s = 0; s < 6; ++s)
        {
            const auto h = gen::random_hypergraph_bounded(10, 40, 3, 12, s);
            SplitInstance inst(h, 0.6, 5.0, false);
            const auto& g = inst.incidence.graph;
            std::vector<int> order;
            for (int x = inst.incidence.virtual_count; x < g.n(); ++x)
                order.push_back(x);
            for (int x = 0; x < inst.incidence.virtual_count; ++x)
                order.push_back(x);
            const auto r = derandomize(inst.algorithm, g, std::span<const SplitRole>(inst.roles), order, opt);
            v.require(trace_sound(r, why), "split seed " + std::to_string(s) + ": " + why);
            below_one += r.initial_expectation < Dyadic(1);
            ++instances;
        }

        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        v.require(instances >= 20, "fewer than 20 instances");
        v.require(secs < kSoundnessBudgetSeconds, "runtime over budget");
        v.detail << instances << " instances (" << below_one << " with E[F] < 1), enumeration oracle, " << secs << " s";
        return v;
    }

    // ------------------------------------------------------------------ 2

    template <class In, class Out>
    int perturbation_violations(const LocalAlgorithm<In, Out>& a, const Graph& g, std::span<const In> in, Rng& rng, int reps)
    {
        int bad = 0;
        const auto layout = a.tape_layout(g);
        for (int rep = 0; rep < reps; ++rep)
        {
            const int v = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(g.n())));
            auto tapes = TapeAssignment::random(layout, rng());
            for (int u = 0; u < g.n(); ++u)
                for (int j = 0; j < tapes.bits(u); ++j)
                    if (rng.coin())
                        tapes.set(u, j, kUnfixed);
            const OracleConfig en{OracleMode::Enumerate, std::uint64_t{1} << 20};
            const Dyadic before = flag_expectation(a, g, in, tapes, v);
            const Dyadic before_en = flag_expectation(a, g, in, tapes, v, en);
            const auto dist = bfs_distances(g, v);
            for (int u = 0; u < g.n(); ++u)
                if (dist[static_cast<std::size_t>(u)] == kUnreached || dist[static_cast<std::size_t>(u)] > a.radius())
                    for (int j = 0; j < tapes.bits(u); ++j)
                        tapes.set(u, j, static_cast<std::int8_t>(static_cast<int>(rng.uniform_below(3)) - 1));
            bad += flag_expectation(a, g, in, tapes, v) != before;
            bad += flag_expectation(a, g, in, tapes, v, en) != before_en;
        }
        return bad;
    }

    Verdict window_restriction()
    {
        Verdict v;
        Rng rng(2024);
        int bad = 0;
        const int each = kPerturbations / 4;
        {
            const Graph g = gen::gnm(40, 60, 1);
            const auto in = no_inputs(g);
            bad += perturbation_violations(testing_algos::RandomColoring(2), g, std::span<const NoInput>(in), rng, each);
            bad += perturbation_violations(testing_algos::RandomColoring(3, true), g, std::span<const NoInput>(in), rng, each);
        }
        {
            const Graph g = gen::grid(6, 6);
            std::vector<char> remaining(36, 1);
            for (int i = 0; i < 36; i += 5)
                remaining[static_cast<std::size_t>(i)] = 0;
            const LinialSaksPhase a(2, remaining);
            bad += perturbation_violations(a, g, std::span<const char>(remaining), rng, each);
        }
        {
            const auto h = gen::random_hypergraph_bounded(10, 40, 3, 12, 7);
            SplitInstance inst(h, 0.6, 5.0, false);
            bad += perturbation_violations(inst.algorithm, inst.incidence.graph, std::span<const SplitRole>(inst.roles), rng,
                                           kPerturbations - 3 * each);
        }
        v.require(bad == 0, std::to_string(bad) + " oracle values changed");
        v.detail << kPerturbations << " perturbations over 4 algorithms, both oracle modes, " << bad << " violations";
        return v;
    }

    // ------------------------------------------------------------------ 3

    // Independent maximality check: every unmatched edge meets a matched one.
    bool exhaustively_maximal(const Hypergraph& h, const std::vector<int>& m)
    {
        std::vector<char> used(static_cast<std::size_t>(h.n()), 0);
        for (int e : m)
            for (int x : h.edge(static_cast<std::size_t>(e)))
            {
                if (used[static_cast<std::size_t>(x)])
                    return false;
                used[static_cast<std::size_t>(x)] = 1;
            }
        for (std::size_t e = 0; e < h.m(); ++e)
        {
            bool touches = false;
            for (int x : h.edge(e))
                touches = touches || used[static_cast<std::size_t>(x)];
            if (!touches)
                return false;
        }
        return true;
    }

    Verdict hypergraph_matching()
    {
        Verdict v;
        int failures = 0, binned_runs = 0, binned_bad = 0;
        for (int s = 0; s < kMatchingInstances; ++s)
        {
            const int n = 20 + (s * 37) % 181;
            const int rank = 2 + s % 3;
            const auto h = gen::random_hypergraph_bounded(n, static_cast<std::size_t>(n) * (1 + s % 2), rank, 8,
                                                          static_cast<std::uint64_t>(s));
            if (h.rank() > 4 || h.max_degree() > 8 || h.n() > 200)
            {
                v.require(false, "generator out of range");
                continue;
            }
            const auto res = hypergraph_maximal_matching(h);
            const bool ok = validate_matching(h, res.matching).pass() && exhaustively_maximal(h, res.matching);
            failures += !ok;
            for (int delta = 1; delta <= std::max(1, h.max_degree()); delta *= 2)
            {
                std::vector<int> u;
                for (int x = 0; x < h.n(); ++x)
                    if (h.degree(x) >= delta)
                        u.push_back(x);
                const auto b = binned_partial_matching(h, u, delta);
                long long weight = 0;
                std::vector<char> in_u(static_cast<std::size_t>(h.n()), 0);
                for (int x : u)
                    in_u[static_cast<std::size_t>(x)] = 1;
                for (int e : b.matching)
                    for (int x : h.edge(static_cast<std::size_t>(e)))
                        weight += in_u[static_cast<std::size_t>(x)];
                const bool disjoint = validate_matching(h, b.matching).disjoint;
                const double need = static_cast<double>(u.size()) * delta / (2.0 * h.rank() * h.max_degree());
                binned_bad += !(disjoint && weight == b.covered_weight && static_cast<double>(weight) >= need);
                ++binned_runs;
            }
        }
        // Binned runs inside the splitting route.
        for (std::uint64_t s = 0; s < 3; ++s)
        {
            const auto h = gen::random_regular_hypergraph(64, 2, 128, s);
            const auto res = hypergraph_maximal_matching(h);
            failures += !(validate_matching(h, res.matching).pass() && exhaustively_maximal(h, res.matching));
            const auto it = iterated_split(h);
            ++binned_runs;
            binned_bad += !validate_matching(h, it.matching).disjoint;
        }
        v.require(failures == 0, std::to_string(failures) + " non-maximal outputs");
        v.require(binned_bad == 0, std::to_string(binned_bad) + " binned runs below bound");
        v.detail << kMatchingInstances + 3 << " hypergraphs, " << failures << " failures; " << binned_runs << " binned runs, "
                 << binned_bad << " below |U| delta / (2 r Delta)";
        return v;
    }

    // ------------------------------------------------------------------ 4

    Hypergraph parallel_edges(int count)
    {
        return Hypergraph(2, std::vector<std::vector<int>>(static_cast<std::size_t>(count), {0, 1}));
    }

    Verdict degree_splitting()
    {
        Verdict v;
        std::vector<std::pair<std::string, Hypergraph>> suite;
        for (int k : {80, 120, 200})
            suite.emplace_back("parallel-" + std::to_string(k), parallel_edges(k));
        for (std::uint64_t s = 0; s < 3; ++s)
            suite.emplace_back("regular-8-2-100 seed " + std::to_string(s), gen::random_regular_hypergraph(8, 2, 100, s));
        for (std::uint64_t s = 0; s < 2; ++s)
            suite.emplace_back("regular-9-3-120 seed " + std::to_string(s), gen::random_regular_hypergraph(9, 3, 120, s));
        int constrained_instances = 0;
        for (const auto& [name, h] : suite)
        {
            const auto sp = degree_split(h, 0.9, DerandomizedSplit{});
            const auto rep = validate_splitting(h, sp.color, sp.eps, sp.delta);
            if (rep.constrained.empty())
                continue;
            ++constrained_instances;
            v.require(sp.total_flags == 0 && rep.pass(), name + ": flags " + std::to_string(sp.total_flags));
        }
        v.require(constrained_instances > 0, "no constrained instance in the suite");

        v.detail << constrained_instances << " constrained instances, all flag-free and split; randomized";

        // Randomized mode: at the default threshold, and at the smallest threshold on a grid
        // where the exact expectation is still below one.
        auto exact_total = [](const SplitInstance& inst) {
            const auto& g = inst.incidence.graph;
            const TapeAssignment empty(inst.algorithm.tape_layout(g));
            Dyadic total;
            for (int x = 0; x < g.n(); ++x)
                total += flag_expectation(inst.algorithm, g, std::span<const SplitRole>(inst.roles), empty, x);
            return total;
        };
        std::vector<std::unique_ptr<SplitInstance>> cases;
        const auto wide = parallel_edges(120);
        cases.push_back(std::make_unique<SplitInstance>(wide, 0.9, default_split_threshold(wide.n(), wide.max_degree(), 0.9), true));
        const auto reg = gen::random_regular_hypergraph(8, 2, 64, 3);
        for (double delta = 8; delta <= 64; delta += 4)
        {
            auto inst = std::make_unique<SplitInstance>(reg, 0.5, delta, true);
            if (exact_total(*inst) < Dyadic(1))
            {
                cases.push_back(std::move(inst));
                break;
            }
        }
        v.require(cases.size() == 2, "no threshold with E[F] < 1");
        for (const auto& inst : cases)
        {
            const auto& g = inst->incidence.graph;
            const auto exact = exact_total(*inst).to_double();
            const auto est = estimate_flag_expectation(inst->algorithm, g, std::span<const SplitRole>(inst->roles), kSplitTrials, 11);
            v.require(est.total_mean + kSigmas * est.total_stderr < 1.0, "randomized empirical mean not below one");
            v.require(std::abs(est.total_mean - exact) <= kSigmas * std::max(est.total_stderr, 1.0 / kSplitTrials),
                      "empirical mean disagrees with exact expectation");
            v.detail << " [delta " << inst->delta << ": mean " << est.total_mean << " +- " << est.total_stderr << ", exact "
                     << exact << "]";
        }
        v.detail << " at " << kSplitTrials << " trials";
        return v;
    }

    // ------------------------------------------------------------------ 5, 6, 8

    // Clause-by-clause check that does not go through the event evaluators.
    bool clauses_satisfied(const lll::Instance& inst, const lll::Assignment& x)
    {
        if (x.size() != inst.var_count())
            return false;
        for (const auto& e : inst.events())
        {
            bool sat = false;
            for (const auto& l : e.clause)
                sat = sat || (x[static_cast<std::size_t>(l.var)] == (l.positive ? 1 : 0));
            if (!sat)
                return false;
        }
        return true;
    }

    // Marginal of a clause event from the literal counts alone.
    double clause_marginal(const lll::Event& e, const lll::Assignment& x)
    {
        int open = 0;
        for (const auto& l : e.clause)
        {
            const int val = x[static_cast<std::size_t>(l.var)];
            if (val == lll::kStar)
                ++open;
            else if (val == (l.positive ? 1 : 0))
                return 0.0;
        }
        return std::ldexp(1.0, -open);
    }

    struct Alg1Stats
    {
        int runs = 0;
        int bound_violations = 0;
        int marginal_mismatch = 0;
    };

    void check_alg1(const lll::Instance& inst, const lll::FreezeResult& fr, Alg1Stats& st)
    {
        ++st.runs;
        double worst = 0;
        for (const auto& e : inst.events())
            worst = std::max(worst, clause_marginal(e, fr.partial));
        st.marginal_mismatch += worst != fr.max_marginal;
        const double p = std::ldexp(1.0, -static_cast<int>(inst.events().front().clause.size()));
        st.bound_violations += !(worst <= 2 * std::pow(std::numbers::e * inst.d(), 8) * p * (1 + 1e-12)) || !fr.within_marginal_bound;
    }

    Alg1Stats g_alg1;

    Verdict lll_solvers()
    {
        Verdict v;
        const auto mt_inst = lll::random_ksat_bounded(150, 90, 7, 3, 11);
        const auto chain = lll::ksat_chain(40, 26, 4, 5);
        const auto seven = lll::random_ksat_bounded(150, 90, 7, 3, 17);
        for (const auto* inst : {&mt_inst, &chain, &seven})
            v.require(std::numbers::e * lll::max_probability(*inst).to_double() * inst->d() <= 1.0, "family violates e p d <= 1");

        int solved[3] = {0, 0, 0}, false_pos = 0;
        for (int s = 0; s < kLllSeeds; ++s)
        {
            const auto seed = static_cast<std::uint64_t>(s);
            const auto mt = lll::moser_tardos(mt_inst, seed);
            if (mt.solved)
            {
                ++solved[0];
                false_pos += !clauses_satisfied(mt_inst, mt.assignment);
            }

            const auto fr = lll::algorithm1_freeze(chain, seed);
            check_alg1(chain, fr, g_alg1);
            lll::ShatterOptions so;
            so.seed = seed;
            const auto r1 = lll::shattering_solve(chain, fr.residual, fr.partial, so);
            if (r1.solved)
            {
                ++solved[1];
                false_pos += !clauses_satisfied(chain, r1.assignment);
            }

            const auto a2 = lll::algorithm2_dangerous(seven, seed);
            const auto r2 = lll::shattering_solve(seven, a2.residual, a2.partial, so);
            if (r2.solved)
            {
                ++solved[2];
                false_pos += !clauses_satisfied(seven, r2.assignment);
            }
        }
        // An unsatisfiable pair of clauses must never be reported solved.
        const auto unsat = lll::cnf_instance(1, {{{0, true}}, {{0, false}}});
        for (int s = 0; s < 5; ++s)
        {
            false_pos += lll::moser_tardos(unsat, static_cast<std::uint64_t>(s), {lll::MTMode::Sequential, 200}).solved;
            const std::vector<int> all{0, 1};
            false_pos += lll::shattering_solve(unsat, all, lll::all_star(unsat)).solved;
        }
        v.require(solved[0] == kLllSeeds && solved[1] == kLllSeeds && solved[2] == kLllSeeds, "some seed unsolved");
        v.require(false_pos == 0, std::to_string(false_pos) + " false positives");
        v.detail << "solved " << solved[0] << "/" << solved[1] << "/" << solved[2] << " of " << kLllSeeds
                 << " (MT, Alg1+shatter, Alg2+shatter), " << false_pos << " false positives";
        return v;
    }

    Verdict alg1_bound()
    {
        Verdict v;
        // Adversarial sources as well: falsify every other clause so marginals climb.
        const auto chain = lll::ksat_chain(30, 26, 4, 9);
        for (std::uint64_t s = 0; s < 20; ++s)
        {
            auto src = lll::sample(chain, s);
            for (int b = static_cast<int>(s % 2); b < static_cast<int>(chain.event_count()); b += 2)
                for (const auto& l : chain.event(b).clause)
                    src[static_cast<std::size_t>(l.var)] = l.positive ? 0 : 1;
            check_alg1(chain, lll::algorithm1_freeze(chain, src), g_alg1);
        }
        v.require(g_alg1.bound_violations == 0, std::to_string(g_alg1.bound_violations) + " runs above 2 (e d)^8 p");
        v.require(g_alg1.marginal_mismatch == 0, std::to_string(g_alg1.marginal_mismatch) + " max-marginal mismatches");
        v.detail << g_alg1.runs << " Algorithm-1 runs, " << g_alg1.bound_violations << " above bound, exact marginals recomputed";
        return v;
    }

    // ------------------------------------------------------------------ 7

    lll::Instance frugality_instance(int vars, int colors_log2, int s)
    {
        std::vector<lll::Variable> vs;
        const int colors = 1 << colors_log2;
        for (int i = 0; i < vars; ++i)
            vs.push_back(lll::Variable{i, std::vector<Dyadic>(static_cast<std::size_t>(colors),
                                                              Dyadic::pow2_inverse(static_cast<unsigned>(colors_log2)))});
        lll::Event e;
        for (int i = 0; i < vars; ++i)
            e.scope.push_back(i);
        e.holds = [colors, s](std::span<const int> x) {
            std::vector<int> count(static_cast<std::size_t>(colors), 0);
            for (int c : x)
                if (++count[static_cast<std::size_t>(c)] >= s)
                    return true;
            return false;
        };
        return lll::Instance(std::move(vs), {std::move(e)});
    }

    Verdict fragility()
    {
        Verdict v;
        for (int k = 1; k <= 8; ++k)
        {
            const auto inst = lll::ksat_chain(1, k, 0, static_cast<std::uint64_t>(k));
            BigInt num = 1;
            for (int i = 0; i < k; ++i)
                num *= 3;
            v.require(lll::fragility_exact(inst, 0) == Dyadic(num, static_cast<unsigned>(2 * k)),
                      "clause width " + std::to_string(k) + " not (3/4)^k");
        }
        int witness_checks = 0, deviation_checks = 0;
        for (int s = 2; s <= 4; ++s)
            for (int vars : {2, 3, 4})
            {
                const auto inst = frugality_instance(vars, 2, s);
                v.require(lll::fragility_exact(inst, 0) <= lll::fragility_witness_bound(inst, 0, s), "witness bound");
                ++witness_checks;
            }
        for (int k = 2; k <= 6; ++k)
        {
            const auto inst = lll::ksat_chain(1, k, 0, 3);
            v.require(lll::fragility_exact(inst, 0) <= lll::fragility_witness_bound(inst, 0, k), "clause witness bound");
            ++witness_checks;
        }
        for (int vars : {4, 6, 8})
            for (double delta : {0.5, 1.0, 2.0})
            {
                std::vector<lll::Variable> vs;
                for (int i = 0; i < vars; ++i)
                    vs.push_back(lll::Variable{i, {Dyadic(BigInt(7), 3), Dyadic(BigInt(1), 3)}});
                std::vector<int> scope(static_cast<std::size_t>(vars));
                std::iota(scope.begin(), scope.end(), 0);
                std::vector<std::vector<double>> c(static_cast<std::size_t>(vars), {0.0, 1.0});
                const double mu = lll::deviation_mean(vs, scope, c);
                const lll::Instance inst(vs, {lll::make_deviation_event(0, scope, c, 2 * mu * (1 + delta))});
                v.require(lll::fragility_exact(inst, 0).to_double() <= lll::fragility_deviation_bound(mu, delta) * (1 + 1e-12),
                          "deviation bound");
                ++deviation_checks;
            }

        // Pr[B is q-dangerous] <= f(B) / q, Monte Carlo.
        const auto inst = lll::random_ksat_bounded(24, 16, 6, 3, 21);
        int mc_checks = 0, mc_bad = 0;
        double worst_gap = -1;
        for (double q : {0.25, 0.5})
        {
            std::vector<int> hits(inst.event_count(), 0);
            for (int t = 0; t < kDangerSamples; ++t)
            {
                const auto x = lll::sample(inst, stream_seed(77, static_cast<std::uint64_t>(t)));
                for (int b = 0; b < static_cast<int>(inst.event_count()); ++b)
                    hits[static_cast<std::size_t>(b)] += lll::is_dangerous(inst, b, x, q).dangerous;
            }
            for (int b = 0; b < static_cast<int>(inst.event_count()); ++b)
            {
                const double f = lll::fragility_exact(inst, b).to_double();
                const double p = hits[static_cast<std::size_t>(b)] / static_cast<double>(kDangerSamples);
                const double se = std::sqrt(std::max(p * (1 - p), 1.0 / kDangerSamples) / kDangerSamples);
                mc_bad += p - kSigmas * se > f / q;
                worst_gap = std::max(worst_gap, p - f / q);
                ++mc_checks;
            }
        }
        v.require(mc_bad == 0, std::to_string(mc_bad) + " events above f/q");
        v.detail << "(3/4)^k exact for k <= 8; " << witness_checks << " witness and " << deviation_checks
                 << " deviation checks; dangerous rate vs f/q on " << mc_checks << " (event, q) pairs at " << kDangerSamples
                 << " samples, max excess " << worst_gap;
        return v;
    }

    // ------------------------------------------------------------------ 8

    Verdict shattering_tail()
    {
        Verdict v;
        const auto chain = lll::ksat_chain(40, 26, 4, 5);
        const int d = chain.d();
        const int delta = chain.dependency().max_degree();
        v.require(d <= 5, "instance has d > 5");
        const std::vector<int> ws{2, 4, 8};
        std::vector<int> hits(ws.size(), 0);
        int nonempty = 0;
        const int violations_before = g_alg1.bound_violations;
        for (int s = 0; s < kTailSeeds; ++s)
        {
            const auto fr = lll::algorithm1_freeze(chain, stream_seed(s, 3));
            check_alg1(chain, fr, g_alg1);
            nonempty += !fr.residual.empty();
            int largest = 0;
            for (int c : lll::residual_component_sizes(chain, fr.residual))
                largest = std::max(largest, c);
            for (std::size_t i = 0; i < ws.size(); ++i)
                hits[i] += largest >= ws[i];
        }
        v.require(g_alg1.bound_violations == violations_before, "Algorithm-1 bound violated on a tail run");
        for (std::size_t i = 0; i < ws.size(); ++i)
        {
            const double p = hits[i] / static_cast<double>(kTailSeeds);
            const double se = std::sqrt(std::max(p * (1 - p), 1.0 / kTailSeeds) / kTailSeeds);
            const double bound = lll::component_tail_bound(delta, 2, ws[i]);
            v.require(p - kSigmas * se <= bound, "w = " + std::to_string(ws[i]));
            v.detail << "Pr[>= " << ws[i] << "] = " << p << " vs " << bound << (bound >= 1 ? " (vacuous)" : "") << "; ";
        }
        v.detail << kTailSeeds << " seeds, d = " << d << ", Delta = " << delta << ", " << nonempty << " nonempty residuals";
        return v;
    }

    // ------------------------------------------------------------------ 9

    template <class Rec>
    bool compiled_matches(const SlocalAlgorithm<NoInput, Rec>& a, const Graph& g, const NetworkDecomposition& d, int& rounds)
    {
        const auto c = compile_slocal_to_local(a, g, d);
        const auto in = no_inputs(g);
        const auto colored = colored_inputs(std::span<const NoInput>(in), d);
        const auto out = run_local(c, g, colored, TapeAssignment(c.tape_layout(g))).outputs;
        rounds = compiled_round_count(c, g, std::span<const std::pair<NoInput, int>>(colored));
        return out == run_slocal(a, g, in, color_id_order(g, d));
    }

    Verdict compiler()
    {
        Verdict v;
        const GreedyColoringSlocal<> coloring;
        const GreedyMisSlocal<> mis;
        int pairs = 0, worst_slack = std::numeric_limits<int>::max();
        for (std::uint64_t s = 0; pairs < kCompilerPairs; ++s)
        {
            const Graph g = s % 2 == 0 ? gen::gnm(30, 50, s) : gen::random_regular(24, 3, s);
            std::vector<NetworkDecomposition> decs;
            decs.push_back(distance_coloring_decomposition(g, 1));
            const auto dd = derandomized_decomposition(g, shuffled(g.n(), s));
            v.require(dd.total_flags == 0, "derandomized decomposition left flags");
            decs.push_back(dd.decomposition);
            for (const auto& d : decs)
            {
                int rounds = 0;
                const bool same_c = compiled_matches<int>(coloring, g, d, rounds);
                const double bound_c = kRoundConstant * d.c_bound * (d.d_bound + 1) * coloring.locality();
                v.require(same_c, "coloring output differs");
                v.require(rounds <= bound_c, "coloring rounds " + std::to_string(rounds));
                worst_slack = std::min(worst_slack, static_cast<int>(bound_c) - rounds);
                const bool same_m = compiled_matches<char>(mis, g, d, rounds);
                const double bound_m = kRoundConstant * d.c_bound * (d.d_bound + 1) * mis.locality();
                v.require(same_m, "mis output differs");
                v.require(rounds <= bound_m, "mis rounds " + std::to_string(rounds));
                worst_slack = std::min(worst_slack, static_cast<int>(bound_m) - rounds);
                pairs += 2;
            }
        }
        v.detail << pairs << " (algorithm, decomposition) pairs bit-identical; min round slack " << worst_slack;
        return v;
    }

    // ------------------------------------------------------------------ 10

    // Maximum matching by memoized search over vertex subsets.
    int brute_force_matching(const Graph& g)
    {
        const int n = g.n();
        std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
        for (const auto& [a, b] : g.edges())
        {
            adj[static_cast<std::size_t>(a)] |= 1U << b;
            adj[static_cast<std::size_t>(b)] |= 1U << a;
        }
        std::vector<std::int8_t> memo(std::size_t{1} << n, -1);
        std::function<int(std::uint32_t)> best = [&](std::uint32_t alive) -> int {
            if (alive == 0)
                return 0;
            auto& m = memo[alive];
            if (m >= 0)
                return m;
            const int v = std::countr_zero(alive);
            const std::uint32_t rest = alive & ~(1U << v);
            int r = best(rest);
            for (std::uint32_t cand = adj[static_cast<std::size_t>(v)] & rest; cand; cand &= cand - 1)
                r = std::max(r, 1 + best(rest & ~(1U << std::countr_zero(cand))));
            m = static_cast<std::int8_t>(r);
            return r;
        };
        return best(n == 32 ? ~0U : (1U << n) - 1);
    }

    int edmonds_matching(const Graph& g)
    {
        using BG = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
        BG bg(static_cast<std::size_t>(g.n()));
        for (const auto& [a, b] : g.edges())
            boost::add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b), bg);
        std::vector<boost::graph_traits<BG>::vertex_descriptor> mate(static_cast<std::size_t>(g.n()));
        boost::edmonds_maximum_cardinality_matching(bg, &mate[0]);
        return static_cast<int>(boost::matching_size(bg, &mate[0]));
    }

    Verdict applications()
    {
        Verdict v;
        int colored = 0;
        for (std::uint64_t s = 0; s < 30; ++s)
        {
            const int n = 10 + static_cast<int>(s % 6) * 10;
            const auto g = gen::bounded_degree(n, 2 + static_cast<int>(s % 5), 4 * static_cast<std::size_t>(n), s);
            const auto c = apps::list_edge_coloring(g, apps::random_palettes(g, 0, 3 * std::max(g.max_degree(), 1), s));
            const bool ok = apps::validate_list_edge_coloring(g, c).pass() &&
                            std::none_of(c.color.begin(), c.color.end(), [](int x) { return x < 0; });
            v.require(ok, "edge coloring seed " + std::to_string(s));
            colored += ok;
        }

        int matched = 0;
        double worst_ratio = 2;
        for (std::uint64_t s = 0; s < 30; ++s)
        {
            const int n = 8 + static_cast<int>(s % 4) * 4;
            const auto g = gen::gnm(n, static_cast<std::size_t>(n) * 3 / 2, 500 + s);
            const int nu = brute_force_matching(g);
            v.require(nu == edmonds_matching(g), "brute force and Edmonds disagree");
            for (double eps : {1.0, 0.5, 1.0 / 3})
            {
                const auto r = apps::approx_maximum_matching(g, eps);
                const bool ok = apps::is_graph_matching(g, r.matching) && r.matching.size() >= (1 - eps) * nu - 1e-9;
                v.require(ok, "approx matching seed " + std::to_string(s));
                matched += ok;
                if (nu > 0)
                    worst_ratio = std::min(worst_ratio, r.matching.size() / static_cast<double>(nu));
            }
        }

        int oriented = 0;
        for (std::uint64_t s = 0; s < 20; ++s)
        {
            const int forests = 1 + static_cast<int>(s % 3);
            const auto cg = gen::forest_union(30 + static_cast<int>(s), forests, s);
            const double eps = s % 2 == 0 ? 0.5 : 1.0;
            const auto r = apps::low_outdegree_orientation(cg.graph, cg.arboricity_bound, eps);
            const bool ok = apps::is_orientation_of(cg.graph, r.orientation) &&
                            r.orientation.max_out_degree(cg.graph.n()) <= static_cast<int>(std::ceil(cg.arboricity_bound * (1 + eps)));
            v.require(ok, "orientation seed " + std::to_string(s));
            oriented += ok;
        }

        std::ostringstream ks;
        int defective = 0;
        for (const auto& [g, h] : std::vector<std::pair<Graph, int>>{{gen::random_regular(40, 4, 3), 1},
                                                                     {gen::random_regular(60, 6, 4), 2},
                                                                     {gen::bounded_degree(120, 16, 120 * 16, 8), 4},
                                                                     {gen::random_regular(30, 5, 2), 5}})
        {
            apps::DefectiveOptions opt;
            if (h == 1)
                opt.K = 1.5;
            const auto r = apps::defective_coloring(g, h, opt);
            const bool ok = apps::is_h_defective(g, r.coloring.color, h);
            v.require(ok, "defective coloring h = " + std::to_string(h));
            defective += ok;
            ks << " k=" << r.coloring.k << "/" << apps::kDefectiveConstant * g.max_degree() / h;
        }

        int sinkless = 0;
        for (int gs = 0; gs < kSinklessGraphs; ++gs)
        {
            const auto g = gen::random_regular(30 + 2 * gs, gs % 3 == 0 ? 4 : 3, static_cast<std::uint64_t>(gs));
            for (int s = 0; s < kSinklessSeeds; ++s)
            {
                const auto r = apps::sinkless_orientation(g, static_cast<std::uint64_t>(s));
                const auto out = r.orientation.out_degrees(g.n());
                const bool ok = apps::is_orientation_of(g, r.orientation) &&
                                std::none_of(out.begin(), out.end(), [](int d) { return d == 0; });
                v.require(ok, "sinkless graph " + std::to_string(gs) + " seed " + std::to_string(s));
                sinkless += ok;
            }
        }

        int sat = 0, sat_bad = 0;
        const auto phi = lll::random_ksat_bounded(150, 90, 7, 3, 23);
        for (std::uint64_t s = 0; s < 20; ++s)
        {
            apps::KsatOptions opt;
            opt.seed = s;
            const auto r = apps::ksat_solve(phi, opt);
            if (r.assignment)
            {
                ++sat;
                sat_bad += !clauses_satisfied(phi, *r.assignment);
            }
        }
        v.require(sat_bad == 0, "k-SAT verdict not verified");
        v.detail << "edge coloring " << colored << "/30, matching " << matched << "/90 (min ratio " << worst_ratio
                 << "), orientation " << oriented << "/20, defective " << defective << "/4 (" << ks.str() << " ), sinkless "
                 << sinkless << "/" << kSinklessGraphs * kSinklessSeeds << ", k-SAT " << sat << " verified";
        return v;
    }

    // ------------------------------------------------------------------ 11

    Verdict cycle_marking_refusal()
    {
        Verdict v;
        bool refused = false;
        std::string msg;
        try
        {
            apps::cycle_marking_derandomize(64);
        }
        catch (const NotLocallyCheckable& e)
        {
            refused = true;
            msg = e.what();
        }
        v.require(refused, "derandomize accepted cycle marking");
        v.require(msg.find("not locally checkable") != std::string::npos, "refusal message");
        v.detail << "refused: " << msg;
        return v;
    }

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"1 derandomizer-soundness", derandomizer_soundness},
        {"2 window-restriction", window_restriction},
        {"3 hypergraph-maximal-matching", hypergraph_matching},
        {"4 degree-splitting", degree_splitting},
        {"5 lll-solvers", lll_solvers},
        {"6 algorithm1-marginal-bound", alg1_bound},
        {"7 fragility", fragility},
        {"8 shattering-tail", shattering_tail},
        {"9 slocal-compiler", compiler},
        {"10 applications", applications},
        {"11 cycle-marking-refusal", cycle_marking_refusal},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria)
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = false;
        std::string detail;
        try
        {
            auto v = run();
            pass = v.pass;
            detail = v.detail.str();
        }
        catch (const std::exception& e)
        {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << " [" << secs << " s]" << std::endl;
        failed += !pass;
    }
    return failed == 0 ? 0 : 1;
}
