#pragma once

#include "dlocal/derandomize.hpp"
#include "dlocal/hypergraph.hpp"
#include "dlocal/local.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dlocal
{
    // ---------------------------------------------------------------- independent sets

    /// Maximal independent set by sequential greedy in ascending ID order; sorted node list.
    inline std::vector<int> mis_greedy(const Graph& g)
    {
        std::vector<char> blocked(static_cast<std::size_t>(g.n()), 0);
        std::vector<int> out;
        for (int v : g.nodes_by_id())
        {
            if (blocked[static_cast<std::size_t>(v)])
                continue;
            out.push_back(v);
            for (int w : g.neighbors(v))
                blocked[static_cast<std::size_t>(w)] = 1;
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    inline std::vector<char> membership(int n, std::span<const int> members)
    {
        std::vector<char> in(static_cast<std::size_t>(n), 0);
        for (int v : members)
            in[static_cast<std::size_t>(v)] = 1;
        return in;
    }

    // ---------------------------------------------------------------- matchings

    /// Hyperedge indices, ascending.
    using Matching = std::vector<int>;

    struct MatchingReport
    {
        bool disjoint = true;
        bool maximal = true;
        std::optional<std::pair<int, int>> overlap; // two matched edges sharing a vertex
        std::optional<int> free_edge;               // unmatched edge disjoint from every matched one
        bool pass() const noexcept { return disjoint && maximal; }
    };

    /// Exhaustive: every pair of matched edges is checked for overlap and every unmatched edge
    /// for a blocking matched edge.
    inline MatchingReport validate_matching(const Hypergraph& h, std::span<const int> m)
    {
        MatchingReport rep;
        std::vector<int> owner(static_cast<std::size_t>(h.n()), -1);
        std::vector<char> chosen(h.m(), 0);
        for (int e : m)
        {
            if (e < 0 || static_cast<std::size_t>(e) >= h.m())
                throw PreconditionError("validate_matching: edge index out of range");
            if (chosen[static_cast<std::size_t>(e)])
                throw PreconditionError("validate_matching: edge listed twice");
            chosen[static_cast<std::size_t>(e)] = 1;
            for (int v : h.edge(static_cast<std::size_t>(e)))
            {
                auto& o = owner[static_cast<std::size_t>(v)];
                if (o != -1 && rep.disjoint)
                {
                    rep.disjoint = false;
                    rep.overlap = std::pair{o, e};
                }
                o = e;
            }
        }
        for (std::size_t e = 0; e < h.m(); ++e)
        {
            if (chosen[e])
                continue;
            bool hit = false;
            for (int v : h.edge(e))
                hit |= owner[static_cast<std::size_t>(v)] != -1;
            if (!hit)
            {
                rep.maximal = false;
                rep.free_edge = static_cast<int>(e);
                break;
            }
        }
        return rep;
    }

    /// Greedy maximal matching among `candidates` (edge indices) avoiding `covered` vertices.
    /// Taking edges in ascending index order is exactly greedy MIS on the candidates' line graph
    /// with edge indices as IDs.
    inline Matching greedy_maximal_matching(const Hypergraph& h, std::span<const int> candidates, std::vector<char>& covered)
    {
        std::vector<int> order(candidates.begin(), candidates.end());
        std::sort(order.begin(), order.end());
        Matching out;
        for (int e : order)
        {
            const auto vs = h.edge(static_cast<std::size_t>(e));
            if (std::none_of(vs.begin(), vs.end(), [&](int v) { return covered[static_cast<std::size_t>(v)] != 0; }))
            {
                out.push_back(e);
                for (int v : vs)
                    covered[static_cast<std::size_t>(v)] = 1;
            }
        }
        return out;
    }

    inline Matching greedy_maximal_matching(const Hypergraph& h)
    {
        std::vector<int> all(h.m());
        std::iota(all.begin(), all.end(), 0);
        std::vector<char> covered(static_cast<std::size_t>(h.n()), 0);
        return greedy_maximal_matching(h, all, covered);
    }

    // ---------------------------------------------------------------- degree splitting

    enum class EdgeColor : char
    {
        Red = 0,
        Blue = 1,
    };

    /// Each color must cover at least this many of a constrained vertex's edges.
    inline double split_requirement(double eps, int degree) { return (1.0 - eps) * degree / 2.0; }

    inline double default_split_threshold(int n, int max_degree, double eps)
    {
        const double nd = static_cast<double>(n) * static_cast<double>(max_degree);
        return 8.0 * std::log(std::max(nd, 1.0)) / (eps * eps);
    }

    struct SplitReport
    {
        std::vector<int> constrained; // vertices of degree >= delta
        std::vector<int> violations;  // constrained vertices short of either color
        bool pass() const noexcept { return violations.empty(); }
    };

    inline SplitReport validate_splitting(const Hypergraph& h, std::span<const EdgeColor> color, double eps, double delta)
    {
        if (color.size() != h.m())
            throw PreconditionError("validate_splitting: one color per hyperedge required");
        SplitReport rep;
        for (int v = 0; v < h.n(); ++v)
        {
            const int d = h.degree(v);
            if (d < delta)
                continue;
            rep.constrained.push_back(v);
            int red = 0;
            for (int e : h.incident(v))
                red += color[static_cast<std::size_t>(e)] == EdgeColor::Red;
            const double need = split_requirement(eps, d);
            if (red < need || d - red < need)
                rep.violations.push_back(v);
        }
        return rep;
    }

    /// Low-degree copy of a hypergraph on its incidence graph. Nodes 0..virtual_count-1 are
    /// virtual vertices, the rest are hyperedges. A vertex of degree d is replaced by
    /// max(1, floor(d / ceil(delta))) copies, its edges (ascending index) dealt to them in
    /// contiguous, near-equal blocks.
    struct VirtualIncidence
    {
        Graph graph;
        int virtual_count = 0;
        std::vector<int> owner;       // virtual node -> hypergraph vertex
        std::vector<char> constrained; // virtual node degree >= delta
        int max_virtual_degree = 0;

        int edge_node(int e) const noexcept { return virtual_count + e; }
    };

    inline VirtualIncidence virtual_incidence(const Hypergraph& h, double delta)
    {
        VirtualIncidence vi;
        const int unit = std::max(1, static_cast<int>(std::ceil(delta)));
        std::vector<std::pair<int, int>> incidences; // (virtual node, edge)
        for (int v = 0; v < h.n(); ++v)
        {
            const auto inc = h.incident(v);
            const int d = static_cast<int>(inc.size());
            const int copies = std::max(1, d / unit);
            for (int c = 0; c < copies; ++c)
            {
                const int lo = static_cast<int>(static_cast<long long>(d) * c / copies);
                const int hi = static_cast<int>(static_cast<long long>(d) * (c + 1) / copies);
                const int node = vi.virtual_count++;
                vi.owner.push_back(v);
                vi.constrained.push_back(hi - lo >= delta ? 1 : 0);
                vi.max_virtual_degree = std::max(vi.max_virtual_degree, hi - lo);
                for (int i = lo; i < hi; ++i)
                    incidences.emplace_back(node, inc[static_cast<std::size_t>(i)]);
            }
        }
        std::vector<Edge> es;
        es.reserve(incidences.size());
        for (const auto& [node, e] : incidences)
            es.emplace_back(node, vi.virtual_count + e);
        vi.graph = build_graph(static_cast<std::size_t>(vi.virtual_count) + h.m(), es);
        return vi;
    }

    /// Per-node role on the virtual incidence graph.
    struct SplitRole
    {
        bool edge_node = false;
        bool constrained = false;

        friend bool operator==(const SplitRole&, const SplitRole&) = default;
    };

    /// Zero-round random splitting with a one-round check: each hyperedge node draws one bit
    /// (0 = red); a constrained virtual node flags when either color falls short.
    class RandomSplit final : public LocalAlgorithm<SplitRole, char>
    {
    public:
        /// Nodes from `first_edge_node` on are hyperedge nodes and carry one bit each.
        RandomSplit(double eps, int first_edge_node, int max_degree, bool exact_oracle = true)
            : eps_(eps), first_edge_(first_edge_node), exact_(exact_oracle)
        {
            // prefix[f][k] = sum_{j <= k} C(f, j)
            prefix_.resize(static_cast<std::size_t>(max_degree) + 1);
            std::vector<BigInt> row{1};
            for (int f = 0; f <= max_degree; ++f)
            {
                if (f > 0)
                {
                    std::vector<BigInt> next(static_cast<std::size_t>(f) + 1, 1);
                    for (int k = 1; k < f; ++k)
                        next[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k) - 1] + row[static_cast<std::size_t>(k)];
                    row = std::move(next);
                }
                auto& p = prefix_[static_cast<std::size_t>(f)];
                p.resize(row.size());
                BigInt s = 0;
                for (std::size_t k = 0; k < row.size(); ++k)
                {
                    s += row[k];
                    p[k] = s;
                }
            }
        }

        std::string name() const override { return "random-split"; }
        int radius() const override { return 1; }

        std::vector<int> tape_layout(const Graph& g) const override
        {
            std::vector<int> layout(static_cast<std::size_t>(g.n()), 0);
            for (int x = first_edge_; x < g.n(); ++x)
                layout[static_cast<std::size_t>(x)] = 1;
            return layout;
        }

        NodeResult<char> compute(const LocalView<SplitRole>& v) const override
        {
            const int c = v.center();
            const auto& role = v.input(c);
            if (role.edge_node)
                return {static_cast<char>(v.bit(c, 0)), false};
            int red = 0;
            for (int w : v.neighbors(c))
                red += v.bit(w, 0) == 0;
            const int d = v.degree(c);
            const double need = split_requirement(eps_, d);
            return {0, role.constrained && (red < need || d - red < need)};
        }

        /// Binomial tail over the free incident hyperedges.
        std::optional<Dyadic> exact_flag_expectation(const LocalView<SplitRole>& v) const override
        {
            if (!exact_)
                return std::nullopt;
            const int c = v.center();
            const auto& role = v.input(c);
            if (role.edge_node || !role.constrained)
                return Dyadic(0);
            int red = 0, blue = 0, free = 0;
            for (int w : v.neighbors(c))
            {
                const auto cell = v.cell(w, 0);
                if (cell == kUnfixed)
                    ++free;
                else if (cell == 0)
                    ++red;
                else
                    ++blue;
            }
            const int d = red + blue + free;
            const double need = split_requirement(eps_, d);
            // Flag iff red + k < need or d - red - k < need, with k ~ Bin(free, 1/2).
            int lo = -1; // largest k with red + k < need
            while (lo + 1 <= free && red + lo + 1 < need)
                ++lo;
            int hi = free + 1; // smallest k with d - red - k < need
            while (hi - 1 >= 0 && d - red - (hi - 1) < need)
                --hi;
            const auto& p = prefix_.at(static_cast<std::size_t>(free));
            auto upto = [&](int k) -> BigInt { return k < 0 ? BigInt(0) : p[static_cast<std::size_t>(k)]; };
            const BigInt all = BigInt(1) << free;
            BigInt count = lo + 1 >= hi ? all : upto(lo) + (all - upto(hi - 1));
            return Dyadic(count, static_cast<unsigned>(free));
        }

    private:
        double eps_;
        int first_edge_;
        bool exact_;
        std::vector<std::vector<BigInt>> prefix_;
    };

    struct RandomizedSplit
    {
        std::uint64_t seed = 0;
    };

    /// Derandomized mode; `order` permutes hyperedge indices (empty = ascending).
    struct DerandomizedSplit
    {
        std::vector<int> order;
    };

    using SplitMode = std::variant<RandomizedSplit, DerandomizedSplit>;

    struct SplitOptions
    {
        std::optional<double> delta; // overrides 8 ln(n Delta) / eps^2
        bool exact_oracle = true;
        OracleConfig oracle{};
    };

    struct Splitting
    {
        std::vector<EdgeColor> color;
        double eps = 0;
        double delta = 0;
        long long total_flags = 0;
        int virtual_nodes = 0;
        int constrained_virtual = 0;
        std::optional<Dyadic> initial_expectation; // derandomized mode only
        std::size_t trace_steps = 0;
        std::vector<TraceRecord> trace; // derandomized mode only

        std::vector<int> red_edges() const
        {
            std::vector<int> out;
            for (std::size_t e = 0; e < color.size(); ++e)
                if (color[e] == EdgeColor::Red)
                    out.push_back(static_cast<int>(e));
            return out;
        }
    };

    /// The splitting problem posed on the virtual incidence graph, ready to run or derandomize.
    struct SplitInstance
    {
        VirtualIncidence incidence;
        std::vector<SplitRole> roles;
        RandomSplit algorithm;
        double delta;

        SplitInstance(const Hypergraph& h, double eps, double delta_, bool exact)
            : incidence(virtual_incidence(h, delta_)), algorithm(eps, incidence.virtual_count, incidence.max_virtual_degree, exact), delta(delta_)
        {
            roles.resize(static_cast<std::size_t>(incidence.graph.n()));
            for (int x = 0; x < incidence.graph.n(); ++x)
            {
                if (x >= incidence.virtual_count)
                    roles[static_cast<std::size_t>(x)].edge_node = true;
                else
                    roles[static_cast<std::size_t>(x)].constrained = incidence.constrained[static_cast<std::size_t>(x)] != 0;
            }
        }
    };

    inline Splitting degree_split(const Hypergraph& h, double eps, const SplitMode& mode, const SplitOptions& opt = {})
    {
        if (!(eps > 0.0 && eps < 1.0))
            throw PreconditionError("degree_split: eps must lie in (0, 1)");
        const double delta = opt.delta.value_or(default_split_threshold(h.n(), h.max_degree(), eps));
        if (!(delta >= 1.0))
            throw PreconditionError("degree_split: delta must be >= 1");
        SplitInstance inst(h, eps, delta, opt.exact_oracle);
        const Graph& b = inst.incidence.graph;

        Splitting out;
        out.eps = eps;
        out.delta = delta;
        out.virtual_nodes = inst.incidence.virtual_count;
        out.constrained_virtual = static_cast<int>(std::count(inst.incidence.constrained.begin(), inst.incidence.constrained.end(), 1));

        LasVegasRun<char> run;
        if (const auto* r = std::get_if<RandomizedSplit>(&mode))
            run = run_local(inst.algorithm, b, inst.roles, TapeAssignment::random(inst.algorithm.tape_layout(b), r->seed));
        else
        {
            const auto& d = std::get<DerandomizedSplit>(mode);
            std::vector<int> edges = d.order;
            if (edges.empty())
            {
                edges.resize(h.m());
                std::iota(edges.begin(), edges.end(), 0);
            }
            require_permutation(edges, static_cast<int>(h.m()));
            // Virtual nodes carry no bits; their place in the order is immaterial.
            std::vector<int> order(static_cast<std::size_t>(inst.incidence.virtual_count));
            std::iota(order.begin(), order.end(), 0);
            for (int e : edges)
                order.push_back(inst.incidence.edge_node(e));
            DerandomizeOptions dopt;
            dopt.oracle = opt.oracle;
            auto res = derandomize(inst.algorithm, b, std::span<const SplitRole>(inst.roles), std::span<const int>(order), dopt);
            out.initial_expectation = res.initial_expectation;
            out.trace_steps = res.trace.size();
            out.trace = std::move(res.trace);
            run = std::move(res.run);
        }
        out.total_flags = run.total_flags;
        out.color.reserve(h.m());
        for (std::size_t e = 0; e < h.m(); ++e)
            out.color.push_back(static_cast<EdgeColor>(run.outputs[static_cast<std::size_t>(inst.incidence.edge_node(static_cast<int>(e)))]));
        return out;
    }

    // ---------------------------------------------------------------- binned partial matching

    struct BinnedMatching
    {
        Matching matching;
        long long covered_weight = 0;        // sum over matched e of |e cap U|
        double guaranteed = 0;               // |U| delta / (2 r Delta)
        std::vector<std::size_t> bin_sizes;  // |E_i|
        std::vector<std::size_t> bin_matched; // |M_i|
    };

    /// Matching of weight sum |e cap U| >= |U| delta / (2 r Delta). Edges are binned by
    /// floor(log2 |e cap U|); bins are matched greedily from the heaviest down, each on the
    /// edges left disjoint from the heavier bins' choices.
    inline BinnedMatching binned_partial_matching(const Hypergraph& h, std::span<const int> u_set, int delta)
    {
        std::vector<char> in_u(static_cast<std::size_t>(h.n()), 0);
        for (int v : u_set)
        {
            if (v < 0 || v >= h.n())
                throw PreconditionError("binned_partial_matching: vertex outside hypergraph");
            if (h.degree(v) < delta)
                throw PreconditionError("binned_partial_matching: vertex " + std::to_string(v) + " has degree " +
                                        std::to_string(h.degree(v)) + " < " + std::to_string(delta));
            in_u[static_cast<std::size_t>(v)] = 1;
        }
        const long long u_count = std::count(in_u.begin(), in_u.end(), 1);
        const int r = std::max(1, h.rank());
        int k = 0;
        while ((1 << k) < r)
            ++k;

        std::vector<std::vector<int>> bins(static_cast<std::size_t>(k) + 1);
        std::vector<int> weight(h.m(), 0);
        for (std::size_t e = 0; e < h.m(); ++e)
        {
            int w = 0;
            for (int v : h.edge(e))
                w += in_u[static_cast<std::size_t>(v)];
            weight[e] = w;
            if (w == 0)
                continue;
            int i = 0;
            while ((2 << i) <= w)
                ++i;
            bins[static_cast<std::size_t>(i)].push_back(static_cast<int>(e));
        }

        BinnedMatching out;
        out.bin_matched.assign(bins.size(), 0);
        for (const auto& b : bins)
            out.bin_sizes.push_back(b.size());
        std::vector<char> covered(static_cast<std::size_t>(h.n()), 0);
        for (int i = k; i >= 0; --i)
        {
            const auto mi = greedy_maximal_matching(h, bins[static_cast<std::size_t>(i)], covered);
            out.bin_matched[static_cast<std::size_t>(i)] = mi.size();
            out.matching.insert(out.matching.end(), mi.begin(), mi.end());
        }
        std::sort(out.matching.begin(), out.matching.end());
        for (int e : out.matching)
            out.covered_weight += weight[static_cast<std::size_t>(e)];

        const long long s = static_cast<long long>(r) * h.max_degree();
        out.guaranteed = s > 0 ? static_cast<double>(u_count) * delta / (2.0 * static_cast<double>(s)) : 0.0;
        if (2 * s * out.covered_weight < u_count * static_cast<long long>(delta))
            throw PostconditionViolation("binned_partial_matching: weight " + std::to_string(out.covered_weight) +
                                         " below |U| delta / (2 r Delta)");
        return out;
    }

    // ---------------------------------------------------------------- iterated splitting

    struct SplitSchedule
    {
        int steps = 1;
        std::vector<double> eps;   // eps_i, i = 1..steps
        std::vector<double> delta; // delta_i
        bool feasible = true;      // every eps_i < 1 and their sum <= 1/2
    };

    /// t = max{1, floor(log D - log log n - 14)}, delta_i = D / 2^{i+1},
    /// eps_i = max{1 / (4 log D), sqrt(16 ln(n D / 2^{i-1}) / (D / 2^i))}; logs base 2.
    inline SplitSchedule split_schedule(int n, int max_degree)
    {
        SplitSchedule s;
        const double D = static_cast<double>(max_degree);
        const double logn = std::log2(std::max(2, n));
        const double raw = std::floor(std::log2(std::max(D, 2.0)) - std::log2(logn) - 14.0);
        s.steps = raw < 1 ? 1 : static_cast<int>(raw);
        double sum = 0;
        for (int i = 1; i <= s.steps; ++i)
        {
            const double p = std::ldexp(1.0, i);
            const double floor_term = 1.0 / (4.0 * std::log2(std::max(D, 2.0)));
            const double dev = std::sqrt(16.0 * std::log(static_cast<double>(n) * D / (p / 2)) / (D / p));
            const double e = std::max(floor_term, dev);
            s.eps.push_back(e);
            s.delta.push_back(D / (2 * p));
            sum += e;
            if (!(e < 1.0))
                s.feasible = false;
        }
        if (sum > 0.5)
            s.feasible = false;
        return s;
    }

    struct SplitStep
    {
        double eps = 0;
        double delta = 0;
        int max_degree = 0;        // Delta_i
        int min_upper_degree = 0;  // min over U_+ of the degree in H_i
        long long flags = 0;
    };

    struct IteratedSplit
    {
        std::vector<int> kept_edges; // edges of H_t, indices into H
        Matching matching;            // indices into H
        std::vector<int> upper;       // U_+
        int covered_upper = 0;        // |U_+ cap V(M)|
        bool fallback = false;        // schedule infeasible, single split used
        std::vector<SplitStep> steps;
        BinnedMatching binned;
    };

    struct IteratedSplitOptions
    {
        double min_degree_factor = 4.0; // requires Delta >= factor * ln n
        SplitOptions split{};
    };

    inline double iterated_split_threshold(int n, double factor) { return factor * std::log(std::max(n, 1)); }

    /// Halves the degree by repeated derandomized splitting (keeping red edges), then matches
    /// U_+ = {v : deg(v) >= Delta/2} on the result. When the asymptotic schedule is not
    /// realizable at this size, a single split with eps = 1/2, delta = Delta/4 is used instead.
    inline IteratedSplit iterated_split(const Hypergraph& h, const IteratedSplitOptions& opt = {})
    {
        const int D = h.max_degree();
        if (D < 1 || D < iterated_split_threshold(h.n(), opt.min_degree_factor))
            throw PreconditionError("iterated_split: max degree " + std::to_string(D) + " below threshold");
        SplitSchedule sched = split_schedule(h.n(), D);
        IteratedSplit out;
        if (!sched.feasible)
        {
            out.fallback = true;
            sched.steps = 1;
            sched.eps = {0.5};
            sched.delta = {D / 4.0};
        }
        for (int v = 0; v < h.n(); ++v)
            if (2 * h.degree(v) >= D)
                out.upper.push_back(v);

        std::vector<int> kept(h.m());
        std::iota(kept.begin(), kept.end(), 0);
        double eps_sum = 0;
        for (int i = 1; i <= sched.steps; ++i)
        {
            const double eps = sched.eps[static_cast<std::size_t>(i) - 1];
            const double delta = std::max(1.0, sched.delta[static_cast<std::size_t>(i) - 1]);
            eps_sum += eps;
            if (eps_sum > 0.5 + 1e-12)
                throw PostconditionViolation("iterated_split: eps sum exceeds 1/2");

            const Hypergraph cur = h.restrict_edges(kept);
            SplitOptions so = opt.split;
            so.delta = delta;
            const Splitting sp = degree_split(cur, eps, DerandomizedSplit{}, so);
            std::vector<int> next;
            for (int e : sp.red_edges())
                next.push_back(kept[static_cast<std::size_t>(e)]);
            kept = std::move(next);

            const Hypergraph hi = h.restrict_edges(kept);
            SplitStep st{eps, delta, hi.max_degree(), 0, sp.total_flags};
            st.min_upper_degree = out.upper.empty() ? 0 : hi.degree(out.upper.front());
            for (int v : out.upper)
                st.min_upper_degree = std::min(st.min_upper_degree, hi.degree(v));
            out.steps.push_back(st);

            const double scale = std::ldexp(static_cast<double>(D), -i);
            if (st.max_degree > (1 + 2 * eps_sum) * scale + 1e-9)
                throw PostconditionViolation("iterated_split: step " + std::to_string(i) + " max degree " +
                                             std::to_string(st.max_degree) + " above (1 + 2 sum eps) Delta / 2^i");
            if (!out.upper.empty() && st.min_upper_degree < scale / 4 - 1e-9)
                throw PostconditionViolation("iterated_split: step " + std::to_string(i) + " U_+ degree " +
                                             std::to_string(st.min_upper_degree) + " below Delta / 2^(i+2)");
        }
        out.kept_edges = kept;

        const Hypergraph ht = h.restrict_edges(kept);
        int min_deg = std::numeric_limits<int>::max();
        for (int v : out.upper)
            min_deg = std::min(min_deg, ht.degree(v));
        if (out.upper.empty())
            min_deg = 0;
        out.binned = binned_partial_matching(ht, out.upper, min_deg);
        std::vector<char> in_m(static_cast<std::size_t>(h.n()), 0);
        for (int e : out.binned.matching)
        {
            const int orig = kept[static_cast<std::size_t>(e)];
            out.matching.push_back(orig);
            for (int v : h.edge(static_cast<std::size_t>(orig)))
                in_m[static_cast<std::size_t>(v)] = 1;
        }
        std::sort(out.matching.begin(), out.matching.end());
        for (int v : out.upper)
            out.covered_upper += in_m[static_cast<std::size_t>(v)];
        return out;
    }

    // ---------------------------------------------------------------- maximal matching

    struct MaximalMatchingOptions
    {
        IteratedSplitOptions split{};
        int max_split_rounds = 10000;
    };

    struct MaximalMatchingResult
    {
        Matching matching;
        bool direct = true;    // line-graph MIS only
        int split_rounds = 0;  // iterated_split applications
        int fallbacks = 0;     // rounds that used the single-split fallback
        std::size_t final_mis_edges = 0;
    };

    /// r * max(1, log2 n)^2: at or below this degree the line graph is small enough to run MIS on.
    inline double direct_mis_threshold(int n, int rank)
    {
        const double lg = std::max(1.0, std::log2(std::max(n, 1)));
        return static_cast<double>(std::max(rank, 1)) * lg * lg;
    }

    inline MaximalMatchingResult hypergraph_maximal_matching(const Hypergraph& h, const MaximalMatchingOptions& opt = {})
    {
        MaximalMatchingResult out;
        const double threshold = direct_mis_threshold(h.n(), h.rank());
        std::vector<char> covered(static_cast<std::size_t>(h.n()), 0);
        std::vector<int> alive(h.m());
        std::iota(alive.begin(), alive.end(), 0);

        auto prune = [&] {
            std::vector<int> next;
            for (int e : alive)
            {
                const auto vs = h.edge(static_cast<std::size_t>(e));
                if (std::none_of(vs.begin(), vs.end(), [&](int v) { return covered[static_cast<std::size_t>(v)] != 0; }))
                    next.push_back(e);
            }
            alive = std::move(next);
        };

        while (out.split_rounds < opt.max_split_rounds)
        {
            const Hypergraph res = h.restrict_edges(alive);
            if (res.max_degree() <= threshold ||
                res.max_degree() < iterated_split_threshold(h.n(), opt.split.min_degree_factor))
                break;
            out.direct = false;
            const IteratedSplit it = iterated_split(res, opt.split);
            ++out.split_rounds;
            out.fallbacks += it.fallback ? 1 : 0;
            if (it.matching.empty())
                break;
            for (int e : it.matching)
            {
                const int orig = alive[static_cast<std::size_t>(e)];
                out.matching.push_back(orig);
                for (int v : h.edge(static_cast<std::size_t>(orig)))
                    covered[static_cast<std::size_t>(v)] = 1;
            }
            prune();
        }
        const auto rest = greedy_maximal_matching(h, alive, covered);
        out.final_mis_edges = rest.size();
        out.matching.insert(out.matching.end(), rest.begin(), rest.end());
        std::sort(out.matching.begin(), out.matching.end());
        if (!validate_matching(h, out.matching).pass())
            throw PostconditionViolation("hypergraph_maximal_matching: output is not a maximal matching");
        return out;
    }

} // namespace dlocal
