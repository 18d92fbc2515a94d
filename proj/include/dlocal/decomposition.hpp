#pragma once

#include "dlocal/derandomize.hpp"
#include "dlocal/graph.hpp"
#include "dlocal/local.hpp"
#include "dlocal/slocal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dlocal
{
    enum class DiameterMode
    {
        Weak,   // cluster diameter measured in the whole graph
        Strong, // measured inside the cluster's induced subgraph
    };

    inline const char* to_string(DiameterMode m) { return m == DiameterMode::Weak ? "weak" : "strong"; }

    /// Colors are 1..c_bound; 0 marks a node no color was assigned to (cluster -1).
    struct NetworkDecomposition
    {
        std::vector<int> color;
        std::vector<int> cluster;
        int d_bound = 0;
        int c_bound = 0;
        DiameterMode mode = DiameterMode::Weak;

        friend bool operator==(const NetworkDecomposition&, const NetworkDecomposition&) = default;
    };

    /// Clusters are the connected components of each color class, numbered by smallest member.
    inline std::vector<int> clusters_from_colors(const Graph& g, std::span<const int> color)
    {
        std::vector<int> cluster(static_cast<std::size_t>(g.n()), -1);
        std::map<int, std::vector<int>> classes;
        for (int v = 0; v < g.n(); ++v)
            if (color[static_cast<std::size_t>(v)] > 0)
                classes[color[static_cast<std::size_t>(v)]].push_back(v);
        std::vector<std::vector<int>> parts;
        for (const auto& [c, nodes] : classes)
        {
            (void)c;
            for (auto& p : components(g, nodes).parts)
                parts.push_back(std::move(p));
        }
        std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (int v : parts[i])
                cluster[static_cast<std::size_t>(v)] = static_cast<int>(i);
        return cluster;
    }

    inline NetworkDecomposition make_decomposition(const Graph& g, std::vector<int> color, int d_bound, int c_bound,
                                                   DiameterMode mode)
    {
        NetworkDecomposition d;
        d.cluster = clusters_from_colors(g, color);
        d.color = std::move(color);
        d.d_bound = d_bound;
        d.c_bound = c_bound;
        d.mode = mode;
        return d;
    }

    struct ClusterReport
    {
        int cluster = 0;
        int color = 0;
        int size = 0;
        int diameter = 0; // -1 if the cluster is not connected where it must be
    };

    struct DecompositionReport
    {
        std::vector<ClusterReport> clusters;
        int colors_used = 0;
        int max_diameter = 0;
        std::vector<int> violating_clusters;
        std::vector<int> uncolored;
        std::vector<std::string> violations;
        bool pass = true;
    };

    /// Exact check of a decomposition against its declared bounds and diameter mode.
    inline DecompositionReport validate_decomposition(const Graph& g, const NetworkDecomposition& d)
    {
        DecompositionReport rep;
        auto fail = [&](std::string msg) {
            rep.pass = false;
            rep.violations.push_back(std::move(msg));
        };
        const auto n = static_cast<std::size_t>(g.n());
        if (d.color.size() != n || d.cluster.size() != n)
        {
            fail("decomposition does not cover every node");
            return rep;
        }
        std::vector<int> seen_colors;
        for (int v = 0; v < g.n(); ++v)
        {
            const int c = d.color[static_cast<std::size_t>(v)];
            if (c < 1 || c > d.c_bound)
            {
                rep.uncolored.push_back(v);
                fail("node " + std::to_string(v) + " has color " + std::to_string(c) + " outside 1.." + std::to_string(d.c_bound));
            }
            else
                seen_colors.push_back(c);
        }
        std::sort(seen_colors.begin(), seen_colors.end());
        rep.colors_used = static_cast<int>(std::unique(seen_colors.begin(), seen_colors.end()) - seen_colors.begin());
        if (rep.colors_used > d.c_bound)
            fail("uses " + std::to_string(rep.colors_used) + " colors, bound " + std::to_string(d.c_bound));

        if (clusters_from_colors(g, d.color) != d.cluster)
            fail("cluster labels are not the connected components of the color classes");

        std::map<int, std::vector<int>> members;
        for (int v = 0; v < g.n(); ++v)
            if (d.cluster[static_cast<std::size_t>(v)] >= 0)
                members[d.cluster[static_cast<std::size_t>(v)]].push_back(v);
        for (const auto& [id, nodes] : members)
        {
            ClusterReport cr;
            cr.cluster = id;
            cr.color = d.color[static_cast<std::size_t>(nodes.front())];
            cr.size = static_cast<int>(nodes.size());
            bool mixed = false;
            for (int v : nodes)
                mixed |= d.color[static_cast<std::size_t>(v)] != cr.color;
            if (mixed)
                fail("cluster " + std::to_string(id) + " mixes colors");
            const Graph* host = &g;
            Graph induced;
            std::vector<int> local = nodes;
            if (d.mode == DiameterMode::Strong)
            {
                induced = induced_subgraph(g, nodes);
                host = &induced;
                std::iota(local.begin(), local.end(), 0);
            }
            for (int s : local)
            {
                const auto dist = bfs_distances(*host, s);
                for (int t : local)
                {
                    const int x = dist[static_cast<std::size_t>(t)];
                    if (x == kUnreached)
                        cr.diameter = -1;
                    else if (cr.diameter >= 0)
                        cr.diameter = std::max(cr.diameter, x);
                }
                if (cr.diameter < 0)
                    break;
            }
            if (cr.diameter < 0 || cr.diameter > d.d_bound)
            {
                rep.violating_clusters.push_back(id);
                fail("cluster " + std::to_string(id) + " has diameter " +
                     (cr.diameter < 0 ? std::string("infinite") : std::to_string(cr.diameter)) + " > " + std::to_string(d.d_bound));
            }
            rep.max_diameter = std::max(rep.max_diameter, cr.diameter);
            rep.clusters.push_back(cr);
        }
        return rep;
    }

    /// Same-color nodes of different clusters are more than r hops apart in g.
    inline bool clusters_separated(const Graph& g, const NetworkDecomposition& d, int r)
    {
        for (int v = 0; v < g.n(); ++v)
        {
            if (d.color[static_cast<std::size_t>(v)] < 1)
                continue;
            for (int u : ball(g, v, r))
                if (d.color[static_cast<std::size_t>(u)] == d.color[static_cast<std::size_t>(v)] &&
                    d.cluster[static_cast<std::size_t>(u)] != d.cluster[static_cast<std::size_t>(v)])
                    return false;
        }
        return true;
    }

    /// A proper coloring of G^{2r} greedy in ID order, as a (0, Delta(G^{2r})+1)-decomposition of G^{2r}.
    inline NetworkDecomposition distance_coloring_decomposition(const Graph& g, int r)
    {
        const Graph p = r >= 1 ? power_graph(g, 2 * r) : g;
        auto color = greedy_coloring(p);
        for (auto& c : color)
            ++c;
        return make_decomposition(p, std::move(color), 0, p.max_degree() + 1, DiameterMode::Strong);
    }

    // ---------------------------------------------------------------------------------------
    // Linial-Saks style randomized decomposition.
    //
    // Phase p (1-based) uses tape bits [(p-1)*cap, p*cap) of every node. A node's radius in a
    // phase is the number of leading one bits of its block, so Pr[radius >= k] = 2^-k, capped
    // at cap. Each node still unclustered is caught by the highest-ID unclustered node u with
    // d(u, v) <= radius(u); it joins u's cluster with the phase as color when d(u, v) < radius(u)
    // and waits for the next phase otherwise. Two adjacent nodes that join in the same phase
    // were caught by the same center, so every cluster sits inside a ball of radius cap - 1.

    struct LinialSaksParams
    {
        int cap = 1;     // maximum radius per phase, also the bits per phase
        int phases = 2;  // = c_bound
        int d_bound = 2; // weak diameter bound, 2 * cap

        static LinialSaksParams for_size(int n)
        {
            const int L = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(1, n)))));
            return {L, 2 * L, 2 * L};
        }
        int bits() const { return cap * phases; }
    };

    struct PhaseOutcome
    {
        int center = -1; // node that caught this one
        bool clustered = false;

        friend bool operator==(const PhaseOutcome&, const PhaseOutcome&) = default;
    };

    namespace detail
    {
        /// `candidates` are (node, distance) pairs of unclustered nodes within cap, any order.
        /// `bit(u, j)` reads bit j of u's phase block.
        template <class IdFn, class BitFn>
        PhaseOutcome catch_node(std::vector<std::pair<int, int>> candidates, int cap, IdFn&& id, BitFn&& bit)
        {
            std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) { return id(a.first) > id(b.first); });
            for (const auto& [u, d] : candidates)
            {
                if (d > cap)
                    continue;
                bool reaches = true;
                for (int j = 0; j < d && reaches; ++j)
                    reaches = bit(u, j) == 1;
                if (!reaches)
                    continue;
                const bool interior = d < cap && bit(u, d) == 1;
                return {u, interior};
            }
            return {}; // unreachable: a node always reaches itself
        }
    } // namespace detail

    /// One phase as a Las Vegas LOCAL algorithm of radius cap. Input: whether the node is still
    /// unclustered. Flag: an unclustered node that stays unclustered this phase.
    class LinialSaksPhase final : public LocalAlgorithm<char, PhaseOutcome>
    {
    public:
        LinialSaksPhase(int cap, std::vector<char> remaining) : cap_(cap), remaining_(std::move(remaining)) {}

        std::string name() const override { return "linial-saks-phase"; }
        int radius() const override { return cap_; }
        std::vector<int> tape_layout(const Graph& g) const override
        {
            std::vector<int> layout(static_cast<std::size_t>(g.n()), 0);
            for (int v = 0; v < g.n(); ++v)
                layout[static_cast<std::size_t>(v)] = remaining_.at(static_cast<std::size_t>(v)) ? cap_ : 0;
            return layout;
        }

        NodeResult<PhaseOutcome> compute(const LocalView<char>& view) const override
        {
            const int v = view.center();
            if (!view.input(v))
                return {};
            const auto out = detail::catch_node(
                candidates(view), cap_, [&](int u) { return view.id(u); }, [&](int u, int j) { return view.bit(u, j); });
            return {out, !out.clustered};
        }

        /// E[flag] in closed form: centers are scanned by decreasing ID and their radii are
        /// independent, so Pr[deferred] = sum_u Pr[no earlier center reaches v] * Pr[radius(u) = d(u,v)].
        std::optional<Dyadic> exact_flag_expectation(const LocalView<char>& view) const override
        {
            const int v = view.center();
            if (!view.input(v))
                return Dyadic(0);
            auto cands = candidates(view);
            std::sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) { return view.id(a.first) > view.id(b.first); });
            auto at_least = [&](int u, int k) {
                int free = 0;
                for (int j = 0; j < k; ++j)
                {
                    const auto c = view.cell(u, j);
                    if (c == 0)
                        return Dyadic(0);
                    free += c == kUnfixed;
                }
                return Dyadic::pow2_inverse(static_cast<unsigned>(free));
            };
            Dyadic total, none_yet(1);
            for (const auto& [u, d] : cands)
            {
                const Dyadic reach = at_least(u, d);
                const Dyadic exactly = d < cap_ ? reach - at_least(u, d + 1) : reach;
                total += none_yet * exactly;
                none_yet = none_yet * (Dyadic(1) - reach);
                if (none_yet == Dyadic(0))
                    break;
            }
            return total;
        }

    private:
        std::vector<std::pair<int, int>> candidates(const LocalView<char>& view) const
        {
            std::vector<std::pair<int, int>> out;
            for (int u : view.nodes())
                if (view.input(u))
                    out.emplace_back(u, view.dist(u));
            return out;
        }

        int cap_;
        std::vector<char> remaining_;
    };

    struct LinialSaksOutcome
    {
        int color = 0; // phase in which the node was clustered, 0 if never
        int center = -1;

        friend bool operator==(const LinialSaksOutcome&, const LinialSaksOutcome&) = default;
    };

    /// All phases as one LOCAL algorithm of radius phases * cap: phase p at v depends on which
    /// nodes within cap are still unclustered, which depends on phase p-1 within 2*cap, and so on.
    class LinialSaks final : public LocalAlgorithm<NoInput, LinialSaksOutcome>
    {
    public:
        explicit LinialSaks(LinialSaksParams p) : p_(p) {}

        const LinialSaksParams& params() const noexcept { return p_; }
        std::string name() const override { return "linial-saks"; }
        int radius() const override { return p_.phases * p_.cap; }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), p_.bits()); }

        NodeResult<LinialSaksOutcome> compute(const LocalView<NoInput>& view) const override
        {
            Memo memo{view, p_, {}, {}};
            const int v = view.center();
            for (int phase = 0; phase < p_.phases; ++phase)
            {
                const auto& o = memo.outcome(v, phase);
                if (o.clustered)
                    return {{phase + 1, o.center}, false};
            }
            return {{0, -1}, true};
        }

    private:
        struct Memo
        {
            const LocalView<NoInput>& view;
            const LinialSaksParams& p;
            std::map<std::pair<int, int>, PhaseOutcome> outcomes;
            std::map<int, std::vector<std::pair<int, int>>> near;

            const std::vector<std::pair<int, int>>& around(int x)
            {
                auto it = near.find(x);
                if (it != near.end())
                    return it->second;
                std::vector<std::pair<int, int>> out{{x, 0}};
                std::map<int, bool> seen{{x, true}};
                for (std::size_t h = 0; h < out.size(); ++h)
                {
                    const auto [u, du] = out[h];
                    if (du >= p.cap)
                        continue;
                    for (int w : view.neighbors(u))
                        if (seen.emplace(w, true).second)
                            out.emplace_back(w, du + 1);
                }
                return near.emplace(x, std::move(out)).first->second;
            }

            bool unclustered_at(int u, int phase)
            {
                for (int q = 0; q < phase; ++q)
                    if (outcome(u, q).clustered)
                        return false;
                return true;
            }

            const PhaseOutcome& outcome(int x, int phase)
            {
                const auto key = std::make_pair(x, phase);
                if (auto it = outcomes.find(key); it != outcomes.end())
                    return it->second;
                std::vector<std::pair<int, int>> cands;
                for (const auto& [u, d] : around(x))
                    if (unclustered_at(u, phase))
                        cands.emplace_back(u, d);
                const int offset = phase * p.cap;
                const auto o = detail::catch_node(
                    std::move(cands), p.cap, [&](int u) { return view.id(u); }, [&](int u, int j) { return view.bit(u, offset + j); });
                return outcomes.emplace(key, o).first->second;
            }
        };

        LinialSaksParams p_;
    };

    struct LinialSaksResult
    {
        NetworkDecomposition decomposition;
        std::vector<LinialSaksOutcome> outcomes;
        std::vector<char> flags;
        long long total_flags = 0;
    };

    inline LinialSaksResult linial_saks_result(const Graph& g, const LinialSaksParams& p, std::vector<LinialSaksOutcome> outcomes)
    {
        LinialSaksResult res;
        std::vector<int> color;
        for (const auto& o : outcomes)
        {
            color.push_back(o.color);
            res.flags.push_back(o.color == 0 ? 1 : 0);
            res.total_flags += o.color == 0;
        }
        res.decomposition = make_decomposition(g, std::move(color), p.d_bound, p.phases, DiameterMode::Weak);
        res.outcomes = std::move(outcomes);
        return res;
    }

    /// Global phase-by-phase simulation of the same process; equals run_local(LinialSaks) exactly.
    inline LinialSaksResult linial_saks_simulate(const Graph& g, const LinialSaksParams& p, const TapeAssignment& tapes)
    {
        const auto n = static_cast<std::size_t>(g.n());
        std::vector<LinialSaksOutcome> out(n);
        std::vector<char> remaining(n, 1);
        for (int phase = 0; phase < p.phases; ++phase)
        {
            std::vector<PhaseOutcome> step(n);
            for (int v = 0; v < g.n(); ++v)
            {
                if (!remaining[static_cast<std::size_t>(v)])
                    continue;
                const auto dist = bfs_distances(g, v, p.cap);
                std::vector<std::pair<int, int>> cands;
                for (int u = 0; u < g.n(); ++u)
                    if (remaining[static_cast<std::size_t>(u)] && dist[static_cast<std::size_t>(u)] != kUnreached)
                        cands.emplace_back(u, dist[static_cast<std::size_t>(u)]);
                step[static_cast<std::size_t>(v)] = detail::catch_node(
                    std::move(cands), p.cap, [&](int u) { return g.id(u); },
                    [&](int u, int j) { return static_cast<int>(tapes.get(u, phase * p.cap + j)); });
            }
            for (int v = 0; v < g.n(); ++v)
                if (remaining[static_cast<std::size_t>(v)] && step[static_cast<std::size_t>(v)].clustered)
                {
                    out[static_cast<std::size_t>(v)] = {phase + 1, step[static_cast<std::size_t>(v)].center};
                    remaining[static_cast<std::size_t>(v)] = 0;
                }
        }
        return linial_saks_result(g, p, std::move(out));
    }

    /// Randomized decomposition from seeded tapes. Flags mark nodes left unclustered.
    inline LinialSaksResult linial_saks(const Graph& g, std::uint64_t seed, std::optional<LinialSaksParams> params = std::nullopt)
    {
        const auto p = params.value_or(LinialSaksParams::for_size(g.n()));
        const auto tapes = TapeAssignment::random(uniform_layout(g.n(), p.bits()), seed);
        return linial_saks_simulate(g, p, tapes);
    }

    struct DerandomizedDecomposition
    {
        NetworkDecomposition decomposition;
        TapeAssignment tapes; // full Linial-Saks tapes; never-read bits are 0
        std::vector<Dyadic> phase_expectation; // E[#deferred] at the start of each phase
        std::vector<long long> phase_deferred;  // realized #deferred after each phase
        std::size_t trace_steps = 0;
        std::vector<TraceRecord> trace; // all phases, steps numbered consecutively
        long long total_flags = 0;
    };

    /// Deterministic decomposition by running the conditional-expectation derandomizer on each
    /// Linial-Saks phase in turn: the phase's flag is "this node stays unclustered", so each
    /// phase leaves at most floor(E[#deferred]) nodes for the next one.
    inline DerandomizedDecomposition derandomized_decomposition(const Graph& g, std::span<const int> order,
                                                                std::optional<LinialSaksParams> params = std::nullopt,
                                                                const DerandomizeOptions& opt = {})
    {
        require_permutation(order, g.n());
        const auto p = params.value_or(LinialSaksParams::for_size(g.n()));
        const auto n = static_cast<std::size_t>(g.n());
        DerandomizedDecomposition res;
        res.tapes = TapeAssignment(uniform_layout(g.n(), p.bits()));
        std::vector<char> remaining(n, 1);
        std::vector<int> color(n, 0);
        for (int phase = 0; phase < p.phases; ++phase)
        {
            const bool any = std::any_of(remaining.begin(), remaining.end(), [](char c) { return c != 0; });
            if (any)
            {
                const LinialSaksPhase a(p.cap, remaining);
                const auto r = derandomize(a, g, std::span<const char>(remaining), order, opt);
                res.phase_expectation.push_back(r.initial_expectation);
                res.phase_deferred.push_back(r.run.total_flags);
                for (auto rec : r.trace)
                {
                    rec.step = res.trace_steps++;
                    res.trace.push_back(std::move(rec));
                }
                for (int v = 0; v < g.n(); ++v)
                {
                    for (int j = 0; j < r.tapes.bits(v); ++j)
                        res.tapes.set(v, phase * p.cap + j, r.tapes.get(v, j));
                    if (remaining[static_cast<std::size_t>(v)] && r.run.outputs[static_cast<std::size_t>(v)].clustered)
                    {
                        color[static_cast<std::size_t>(v)] = phase + 1;
                        remaining[static_cast<std::size_t>(v)] = 0;
                    }
                }
            }
            for (int v = 0; v < g.n(); ++v)
                for (int j = 0; j < p.cap; ++j)
                    if (!res.tapes.is_fixed(v, phase * p.cap + j))
                        res.tapes.set(v, phase * p.cap + j, 0);
        }
        res.decomposition = make_decomposition(g, std::move(color), p.d_bound, p.phases, DiameterMode::Weak);
        for (int c : res.decomposition.color)
            res.total_flags += c == 0;

        // The assembled tapes must reproduce the decomposition through the full algorithm.
        if (linial_saks_simulate(g, p, res.tapes).decomposition != res.decomposition)
            throw PostconditionViolation("derandomized decomposition: phase tapes do not reproduce the decomposition");
        return res;
    }

    inline DerandomizedDecomposition derandomized_decomposition(const Graph& g, const std::vector<int>& order,
                                                                std::optional<LinialSaksParams> params = std::nullopt,
                                                                const DerandomizeOptions& opt = {})
    {
        return derandomized_decomposition(g, std::span<const int>(order), params, opt);
    }

    // ---------------------------------------------------------------------------------------
    // SLOCAL -> LOCAL compilation over a decomposition of G^r.

    /// Node order by (color, ID).
    inline std::vector<int> color_id_order(const Graph& g, const NetworkDecomposition& d)
    {
        auto order = identity_order(g.n());
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const auto ka = std::make_pair(d.color[static_cast<std::size_t>(a)], g.id(a));
            const auto kb = std::make_pair(d.color[static_cast<std::size_t>(b)], g.id(b));
            return ka < kb;
        });
        return order;
    }

    template <class In>
    std::vector<std::pair<In, int>> colored_inputs(std::span<const In> inputs, const NetworkDecomposition& d)
    {
        std::vector<std::pair<In, int>> out;
        out.reserve(inputs.size());
        for (std::size_t v = 0; v < inputs.size(); ++v)
            out.emplace_back(inputs[v], d.color[v]);
        return out;
    }

    /// Runs an SLOCAL algorithm as a deterministic LOCAL algorithm. Node v simulates the steps of
    /// every node its own step transitively depends on (earlier in (color, ID) order and within
    /// the locality), in that order. Inside one color these stay in v's cluster, so the whole
    /// dependency set lies within colors * (d_bound + 1) * locality hops.
    template <class In, class Rec>
    class CompiledSlocal final : public LocalAlgorithm<std::pair<In, int>, Rec>
    {
    public:
        using Input = std::pair<In, int>;

        CompiledSlocal(const SlocalAlgorithm<In, Rec>& a, int d_bound, int c_bound) : a_(a), d_bound_(d_bound), c_bound_(c_bound) {}

        std::string name() const override { return "compiled(" + a_.name() + ")"; }
        int radius() const override { return c_bound_ * (d_bound_ + 1) * a_.locality(); }
        std::vector<int> tape_layout(const Graph& g) const override { return uniform_layout(g.n(), 0); }
        FlagSemantics flag_semantics() const override { return FlagSemantics::LasVegas; }

        NodeResult<Rec> compute(const LocalView<Input>& view) const override { return {simulate(view).first, false}; }

        /// Output of the center and the farthest hop any simulated step reached.
        std::pair<Rec, int> simulate(const LocalView<Input>& view) const
        {
            const int r = a_.locality();
            auto key = [&](int u) { return std::make_pair(view.input(u).second, view.id(u)); };
            std::map<int, std::vector<std::pair<int, int>>> near;
            auto around = [&](int x) -> const std::vector<std::pair<int, int>>& {
                if (auto it = near.find(x); it != near.end())
                    return it->second;
                std::vector<std::pair<int, int>> out{{x, 0}};
                std::map<int, int> seen{{x, 0}};
                for (std::size_t h = 0; h < out.size(); ++h)
                {
                    const auto [u, du] = out[h];
                    if (du >= r)
                        continue;
                    for (int w : view.neighbors(u))
                        if (seen.emplace(w, du + 1).second)
                            out.emplace_back(w, du + 1);
                }
                return near.emplace(x, std::move(out)).first->second;
            };

            const int v = view.center();
            std::vector<int> closure{v};
            std::map<int, bool> in{{v, true}};
            for (std::size_t h = 0; h < closure.size(); ++h)
            {
                const int x = closure[h];
                for (const auto& [u, d] : around(x))
                    if (d > 0 && key(u) < key(x) && in.emplace(u, true).second)
                        closure.push_back(u);
            }
            std::sort(closure.begin(), closure.end(), [&](int a, int b) { return key(a) < key(b); });

            std::map<int, Rec> records;
            int reach = 0;
            for (int x : closure)
            {
                reach = std::max(reach, view.dist(x) + r);
                const StepView sv(view, x, r, around(x), records);
                records.emplace(x, a_.step(sv));
            }
            return {records.at(v), reach};
        }

    private:
        class StepView final : public SlocalView<In, Rec>
        {
        public:
            StepView(const LocalView<Input>& view, int center, int radius, const std::vector<std::pair<int, int>>& near,
                     const std::map<int, Rec>& records)
                : view_(view), center_(center), radius_(radius), records_(records)
            {
                for (const auto& [u, d] : near)
                    dist_.emplace(u, d);
            }
            int center() const override { return center_; }
            int radius() const override { return radius_; }
            int dist(int u) const override
            {
                auto it = dist_.find(u);
                return it == dist_.end() ? kUnreached : it->second;
            }
            std::span<const int> neighbors(int u) const override
            {
                require(u);
                return view_.neighbors(u);
            }
            NodeId id(int u) const override
            {
                require(u);
                return view_.id(u);
            }
            const In& input(int u) const override
            {
                require(u);
                return view_.input(u).first;
            }
            const Rec* record(int u) const override
            {
                require(u);
                auto it = records_.find(u);
                return it == records_.end() ? nullptr : &it->second;
            }

        private:
            void require(int u) const
            {
                if (!dist_.count(u))
                    throw ContractViolation("compiled SLOCAL step at " + std::to_string(center_) + " read node " + std::to_string(u));
            }
            const LocalView<Input>& view_;
            int center_;
            int radius_;
            std::map<int, int> dist_;
            const std::map<int, Rec>& records_;
        };

        const SlocalAlgorithm<In, Rec>& a_;
        int d_bound_;
        int c_bound_;
    };

    /// Checks that `d` is a valid decomposition of G^r (r = the algorithm's locality) and returns
    /// the compiled LOCAL algorithm; its declared radius is c_bound * (d_bound + 1) * r.
    template <class In, class Rec>
    CompiledSlocal<In, Rec> compile_slocal_to_local(const SlocalAlgorithm<In, Rec>& a, const Graph& g, const NetworkDecomposition& d)
    {
        const int r = a.locality();
        const auto rep = validate_decomposition(r >= 1 ? power_graph(g, r) : build_graph(static_cast<std::size_t>(g.n()), std::vector<Edge>{}), d);
        if (!rep.pass)
            throw PreconditionError("compile_slocal_to_local: not a valid decomposition of G^" + std::to_string(r) + ": " +
                                    rep.violations.front());
        return CompiledSlocal<In, Rec>(a, d.d_bound, d.c_bound);
    }

    /// Largest number of hops any node's simulation reached (the simulated round count).
    template <class In, class Rec>
    int compiled_round_count(const CompiledSlocal<In, Rec>& c, const Graph& g, std::span<const std::pair<In, int>> inputs)
    {
        const TapeAssignment none(uniform_layout(g.n(), 0));
        int rounds = 0;
        for (int v = 0; v < g.n(); ++v)
        {
            const Ball b(g, v, c.radius());
            rounds = std::max(rounds, c.simulate(LocalView<std::pair<In, int>>(g, b, inputs, none)).second);
        }
        return rounds;
    }

} // namespace dlocal
