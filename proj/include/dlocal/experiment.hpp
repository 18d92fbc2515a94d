#pragma once

#include "dlocal/applications.hpp"
#include "dlocal/concurrency.hpp"
#include "dlocal/decomposition.hpp"
#include "dlocal/generators.hpp"
#include "dlocal/graph_io.hpp"
#include "dlocal/hypergraph_matching.hpp"
#include "dlocal/lll.hpp"
#include "dlocal/records.hpp"
#include "dlocal/solution_check.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dlocal::experiment
{
    using report::Json;

    enum class InputKind
    {
        Graph,
        Hypergraph,
        Cnf,
    };

    inline std::string to_string(InputKind k)
    {
        switch (k)
        {
        case InputKind::Graph:
            return "graph";
        case InputKind::Hypergraph:
            return "hypergraph";
        case InputKind::Cnf:
            return "cnf";
        }
        return "?";
    }

    inline InputKind parse_kind(const std::string& s, const std::string& path)
    {
        if (s == "graph")
            return InputKind::Graph;
        if (s == "hypergraph")
            return InputKind::Hypergraph;
        if (s == "cnf")
            return InputKind::Cnf;
        throw ConfigError(path + ": unknown kind '" + s + "' (graph, hypergraph, cnf)");
    }

    /// Typed access to a JSON object whose errors name the field path. finish() rejects keys
    /// nothing asked for, so typos fail loudly.
    class ParamReader
    {
    public:
        ParamReader(const Json& obj, std::string path) : path_(std::move(path))
        {
            if (obj.is_null())
                obj_ = Json::object();
            else if (!obj.is_object())
                throw ConfigError(path_ + ": expected an object");
            else
                obj_ = obj;
        }

        bool has(const std::string& key) const { return obj_.contains(key); }
        std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

        const Json* raw(const std::string& key)
        {
            used_.insert(key);
            return obj_.contains(key) ? &obj_.at(key) : nullptr;
        }

        double number(const std::string& key, std::optional<double> def, const std::function<bool(double)>& ok,
                      const std::string& requirement)
        {
            const Json* v = raw(key);
            if (!v)
            {
                if (!def)
                    throw ConfigError(at(key) + ": required");
                return *def;
            }
            if (!v->is_number())
                throw ConfigError(at(key) + ": expected a number");
            const double x = v->get<double>();
            if (!ok(x))
                throw ConfigError(at(key) + ": " + requirement);
            return x;
        }

        long long integer(const std::string& key, std::optional<long long> def, long long lo, long long hi)
        {
            const Json* v = raw(key);
            if (!v)
            {
                if (!def)
                    throw ConfigError(at(key) + ": required");
                return *def;
            }
            if (!v->is_number_integer())
                throw ConfigError(at(key) + ": expected an integer");
            const auto x = v->get<long long>();
            if (x < lo || x > hi)
                throw ConfigError(at(key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return x;
        }

        std::uint64_t seed(const std::string& key, std::uint64_t def)
        {
            const Json* v = raw(key);
            if (!v)
                return def;
            if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<long long>() < 0))
                throw ConfigError(at(key) + ": expected a non-negative integer");
            return v->get<std::uint64_t>();
        }

        bool boolean(const std::string& key, bool def)
        {
            const Json* v = raw(key);
            if (!v)
                return def;
            if (!v->is_boolean())
                throw ConfigError(at(key) + ": expected true or false");
            return v->get<bool>();
        }

        std::string text(const std::string& key, std::optional<std::string> def)
        {
            const Json* v = raw(key);
            if (!v)
            {
                if (!def)
                    throw ConfigError(at(key) + ": required");
                return *def;
            }
            if (!v->is_string())
                throw ConfigError(at(key) + ": expected a string");
            return v->get<std::string>();
        }

        std::string choice(const std::string& key, std::optional<std::string> def, const std::vector<std::string>& options)
        {
            auto s = text(key, def);
            if (std::find(options.begin(), options.end(), s) == options.end())
            {
                std::string list;
                for (const auto& o : options)
                    list += (list.empty() ? "" : ", ") + o;
                throw ConfigError(at(key) + ": '" + s + "' is not one of " + list);
            }
            return s;
        }

        void finish() const
        {
            for (const auto& [k, v] : obj_.items())
                if (!used_.count(k))
                    throw ConfigError(at(k) + ": unknown field");
        }

    private:
        Json obj_;
        std::string path_;
        std::set<std::string> used_;
    };

    // ------------------------------------------------------------ instances

    struct LoadedInstance
    {
        InputKind kind = InputKind::Graph;
        Graph graph;
        Hypergraph hypergraph;
        std::optional<lll::Instance> cnf;
        std::optional<int> arboricity; // certified bound, from a generator or a "# arboricity" line
        std::string text;              // serialized form, what validators read

        int size() const
        {
            switch (kind)
            {
            case InputKind::Graph:
                return graph.n();
            case InputKind::Hypergraph:
                return hypergraph.n();
            case InputKind::Cnf:
                return static_cast<int>(cnf->var_count());
            }
            return 0;
        }

        std::size_t items() const
        {
            switch (kind)
            {
            case InputKind::Graph:
                return graph.edges().size();
            case InputKind::Hypergraph:
                return hypergraph.m();
            case InputKind::Cnf:
                return cnf->event_count();
            }
            return 0;
        }
    };

    inline std::optional<int> arboricity_comment(const std::string& text)
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
        {
            std::istringstream ls(line);
            std::string hash, word;
            int value = 0;
            if (ls >> hash >> word >> value && hash == "#" && word == "arboricity")
                return value;
        }
        return std::nullopt;
    }

    inline LoadedInstance load_instance_text(const std::string& text, InputKind kind)
    {
        LoadedInstance li;
        li.kind = kind;
        li.text = text;
        std::istringstream in(text);
        switch (kind)
        {
        case InputKind::Graph:
            li.graph = io::read_graph(in);
            li.arboricity = arboricity_comment(text);
            break;
        case InputKind::Hypergraph:
            li.hypergraph = io::read_hypergraph(in);
            break;
        case InputKind::Cnf:
            li.cnf = report::parse_cnf_text(text);
            break;
        }
        return li;
    }

    struct GeneratorSpec
    {
        std::string name;
        InputKind kind = InputKind::Graph;
        std::map<std::string, long long> args;
        std::optional<std::uint64_t> seed; // fixed instance seed; otherwise the sweep seed
    };

    namespace detail
    {
        struct GeneratorInfo
        {
            InputKind kind;
            std::vector<std::string> args;
        };

        inline const std::map<std::string, GeneratorInfo>& generators()
        {
            static const std::map<std::string, GeneratorInfo> table{
                {"path", {InputKind::Graph, {"n"}}},
                {"cycle", {InputKind::Graph, {"n"}}},
                {"complete", {InputKind::Graph, {"n"}}},
                {"grid", {InputKind::Graph, {"width", "height"}}},
                {"disjoint_edges", {InputKind::Graph, {"k"}}},
                {"random_regular", {InputKind::Graph, {"n", "degree"}}},
                {"gnm", {InputKind::Graph, {"n", "m"}}},
                {"bounded_degree", {InputKind::Graph, {"n", "max_degree", "attempts"}}},
                {"random_tree", {InputKind::Graph, {"n"}}},
                {"forest_union", {InputKind::Graph, {"n", "forests"}}},
                {"random_hypergraph", {InputKind::Hypergraph, {"n", "m", "rank"}}},
                {"random_hypergraph_bounded", {InputKind::Hypergraph, {"n", "m", "rank", "max_degree"}}},
                {"random_regular_hypergraph", {InputKind::Hypergraph, {"n", "rank", "degree"}}},
                {"ksat_chain", {InputKind::Cnf, {"m", "k", "overlap"}}},
                {"random_ksat", {InputKind::Cnf, {"vars", "m", "k", "max_occ"}}},
            };
            return table;
        }
    } // namespace detail

    inline std::vector<std::string> generator_names()
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : detail::generators())
            out.push_back(k);
        return out;
    }

    /// Reads {"generator": name, <args>..., "seed"?} with errors under `path`.
    inline GeneratorSpec parse_generator(const Json& obj, const std::string& path)
    {
        ParamReader r(obj, path);
        GeneratorSpec g;
        g.name = r.choice("generator", std::nullopt, generator_names());
        const auto& info = detail::generators().at(g.name);
        g.kind = info.kind;
        for (const auto& a : info.args)
            g.args[a] = r.integer(a, std::nullopt, 0, 100'000'000);
        if (r.has("seed"))
            g.seed = r.seed("seed", 0);
        r.finish();
        return g;
    }

    inline LoadedInstance generate_instance(const GeneratorSpec& spec, std::uint64_t seed)
    {
        auto a = [&](const char* k) { return spec.args.at(k); };
        auto i = [&](const char* k) { return static_cast<int>(spec.args.at(k)); };
        LoadedInstance li;
        li.kind = spec.kind;
        const auto& n = spec.name;
        if (n == "path")
            li.graph = gen::path(i("n"));
        else if (n == "cycle")
            li.graph = gen::cycle(i("n"));
        else if (n == "complete")
            li.graph = gen::complete(i("n"));
        else if (n == "grid")
            li.graph = gen::grid(i("width"), i("height"));
        else if (n == "disjoint_edges")
            li.graph = gen::disjoint_edges(i("k"));
        else if (n == "random_regular")
            li.graph = gen::random_regular(i("n"), i("degree"), seed);
        else if (n == "gnm")
            li.graph = gen::gnm(i("n"), static_cast<std::size_t>(a("m")), seed);
        else if (n == "bounded_degree")
            li.graph = gen::bounded_degree(i("n"), i("max_degree"), static_cast<std::size_t>(a("attempts")), seed);
        else if (n == "random_tree")
            li.graph = gen::random_tree(i("n"), seed);
        else if (n == "forest_union")
        {
            auto c = gen::forest_union(i("n"), i("forests"), seed);
            li.graph = std::move(c.graph);
            li.arboricity = c.arboricity_bound;
        }
        else if (n == "random_hypergraph")
            li.hypergraph = gen::random_hypergraph(i("n"), static_cast<std::size_t>(a("m")), i("rank"), seed);
        else if (n == "random_hypergraph_bounded")
            li.hypergraph = gen::random_hypergraph_bounded(i("n"), static_cast<std::size_t>(a("m")), i("rank"), i("max_degree"), seed);
        else if (n == "random_regular_hypergraph")
            li.hypergraph = gen::random_regular_hypergraph(i("n"), i("rank"), i("degree"), seed);
        else if (n == "ksat_chain")
            li.cnf = lll::ksat_chain(i("m"), i("k"), i("overlap"), seed);
        else if (n == "random_ksat")
            li.cnf = lll::random_ksat_bounded(i("vars"), i("m"), i("k"), i("max_occ"), seed);
        else
            throw ConfigError("instance.generator: unknown generator '" + n + "'");

        std::ostringstream out;
        switch (li.kind)
        {
        case InputKind::Graph:
            if (li.arboricity)
                out << "# arboricity " << *li.arboricity << '\n';
            io::write_graph(out, li.graph);
            break;
        case InputKind::Hypergraph:
            io::write_hypergraph(out, li.hypergraph);
            break;
        case InputKind::Cnf:
            lll::write_dimacs(out, *li.cnf);
            break;
        }
        li.text = out.str();
        return li;
    }

    // ------------------------------------------------------------ algorithms

    struct Caps
    {
        std::uint64_t enumeration = std::uint64_t{1} << 20; // marginal and oracle completions
        int neighborhood = 20;                              // dangerous-event subset cap
        std::uint64_t search_budget = std::uint64_t{1} << 22;
        std::size_t mt_max_steps = 1'000'000;
    };

    struct AlgorithmSpec
    {
        std::string name;
        InputKind kind = InputKind::Graph;
        double eps = 0.5;
        std::optional<double> delta;
        std::optional<int> lambda;
        int h = 1;
        int radius = 1;
        int extra = 0;
        int universe = 0; // 0: twice the palette size
        double K = 100;
        double final_factor = 1;
        bool derandomized = true;
        bool random_order = false;
        bool exact_oracle = true;
        lll::MTMode mt_mode = lll::MTMode::Sequential;
        lll::ShatterBackend backend = lll::ShatterBackend::Exhaustive;
    };

    namespace detail
    {
        inline const std::map<std::string, InputKind>& algorithms()
        {
            static const std::map<std::string, InputKind> table{
                {"linial-saks", InputKind::Graph},     {"decompose-derandomized", InputKind::Graph},
                {"decompose-coloring", InputKind::Graph}, {"edgecolor", InputKind::Graph},
                {"approx-matching", InputKind::Graph}, {"orient", InputKind::Graph},
                {"defective", InputKind::Graph},       {"sinkless", InputKind::Graph},
                {"cycle-marking", InputKind::Graph},   {"split", InputKind::Hypergraph},
                {"match", InputKind::Hypergraph},      {"mt", InputKind::Cnf},
                {"alg1", InputKind::Cnf},              {"alg2", InputKind::Cnf},
                {"ksat", InputKind::Cnf},
            };
            return table;
        }

        inline lll::ShatterBackend parse_backend(ParamReader& r)
        {
            const auto b = r.choice("backend", "exhaustive", {"exhaustive", "mt", "derandomized-mt"});
            if (b == "mt")
                return lll::ShatterBackend::MT;
            if (b == "derandomized-mt")
                return lll::ShatterBackend::DerandomizedMT;
            return lll::ShatterBackend::Exhaustive;
        }
    } // namespace detail

    inline std::vector<std::string> algorithm_names()
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : detail::algorithms())
            out.push_back(k);
        return out;
    }

    /// Validates the parameters of `name` under `path` (e.g. "algorithm.params").
    inline AlgorithmSpec parse_algorithm(const std::string& name, const Json& params, const std::string& path)
    {
        const auto it = detail::algorithms().find(name);
        if (it == detail::algorithms().end())
            throw ConfigError(path + ": unknown algorithm '" + name + "'");
        AlgorithmSpec s;
        s.name = name;
        s.kind = it->second;
        ParamReader r(params, path);
        auto positive = [](double x) { return x > 0; };
        if (name == "decompose-derandomized")
            s.random_order = r.choice("order", "id", {"id", "random"}) == "random";
        else if (name == "decompose-coloring")
            s.radius = static_cast<int>(r.integer("radius", 1, 1, 64));
        else if (name == "edgecolor")
        {
            s.extra = static_cast<int>(r.integer("extra", 0, 0, 1'000'000));
            s.universe = static_cast<int>(r.integer("universe", 0, 0, 10'000'000));
        }
        else if (name == "approx-matching")
            s.eps = r.number("eps", 0.5, [](double x) { return x > 0 && x <= 1; }, "must lie in (0, 1]");
        else if (name == "orient")
        {
            s.eps = r.number("eps", 1.0, positive, "must be positive");
            if (r.has("lambda"))
                s.lambda = static_cast<int>(r.integer("lambda", 1, 1, 1'000'000));
        }
        else if (name == "defective")
        {
            s.h = static_cast<int>(r.integer("h", 1, 1, 1'000'000));
            s.K = r.number("K", 100.0, positive, "must be positive");
            s.final_factor = r.number("final_factor", 1.0, positive, "must be positive");
        }
        else if (name == "cycle-marking")
            s.derandomized = r.boolean("derandomize", false);
        else if (name == "split")
        {
            s.eps = r.number("eps", 0.5, [](double x) { return x > 0 && x < 1; }, "must lie in (0, 1)");
            s.derandomized = r.choice("mode", "derandomized", {"derandomized", "randomized"}) == "derandomized";
            if (r.has("delta"))
                s.delta = r.number("delta", 1.0, [](double x) { return x >= 1; }, "must be >= 1");
            s.exact_oracle = r.boolean("exact_oracle", true);
        }
        else if (name == "mt")
            s.mt_mode = r.choice("mode", "sequential", {"sequential", "parallel"}) == "parallel" ? lll::MTMode::ParallelRounds
                                                                                                 : lll::MTMode::Sequential;
        else if (name == "alg1" || name == "alg2" || name == "ksat")
            s.backend = detail::parse_backend(r);
        r.finish();
        return s;
    }

    struct Outcome
    {
        std::optional<Json> solution; // absent when the algorithm produced no output to check
        std::optional<long long> flags;
        Json metrics = Json::object();
        std::vector<int> component_sizes;
        std::vector<TraceRecord> trace;
    };

    namespace detail
    {
        inline std::vector<int> random_permutation(int n, std::uint64_t seed)
        {
            auto p = identity_order(n);
            Rng rng(stream_seed(seed, 0x0de7));
            for (int i = n - 1; i > 0; --i)
                std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1))]);
            return p;
        }

        inline int colors_used(std::span<const int> color)
        {
            std::set<int> s(color.begin(), color.end());
            s.erase(0);
            return static_cast<int>(s.size());
        }

        inline lll::ShatterOptions shatter_options(const AlgorithmSpec& s, const Caps& caps, std::uint64_t seed)
        {
            lll::ShatterOptions o;
            o.backend = s.backend;
            o.search_budget = caps.search_budget;
            o.mt_max_steps = caps.mt_max_steps;
            o.seed = seed;
            o.marginal.cap = caps.enumeration;
            return o;
        }

        inline void shatter_metrics(Outcome& out, const lll::Instance& inst, std::span<const int> residual, const lll::ShatterResult& sh)
        {
            out.component_sizes = lll::residual_component_sizes(inst, residual);
            out.metrics["residual_events"] = residual.size();
            out.metrics["components"] = sh.components.size();
            out.metrics["largest_component"] =
                out.component_sizes.empty() ? 0 : *std::max_element(out.component_sizes.begin(), out.component_sizes.end());
            std::size_t work = 0;
            for (const auto& c : sh.components)
                work += c.work;
            out.metrics["residual_work"] = work;
            out.metrics["solved"] = sh.solved;
            if (sh.solved)
                out.solution = report::assignment_solution(sh.assignment);
        }
    } // namespace detail

    /// Runs one algorithm on one instance; `seed` drives every random choice.
    inline Outcome run_algorithm(const AlgorithmSpec& s, const LoadedInstance& in, std::uint64_t seed, const Caps& caps = {})
    {
        if (s.kind != in.kind)
            throw PreconditionError(s.name + ": needs a " + to_string(s.kind) + " instance, got " + to_string(in.kind));
        Outcome out;
        auto& m = out.metrics;
        const auto& g = in.graph;
        DerandomizeOptions dopt;
        dopt.oracle.completion_cap = caps.enumeration;
        lll::MarginalOptions mopt;
        mopt.cap = caps.enumeration;

        if (s.name == "linial-saks")
        {
            const auto r = linial_saks(g, seed);
            out.solution = report::decomposition_solution(r.decomposition);
            out.flags = r.total_flags;
            m["colors_used"] = detail::colors_used(r.decomposition.color);
            m["c_bound"] = r.decomposition.c_bound;
            m["d_bound"] = r.decomposition.d_bound;
        }
        else if (s.name == "decompose-derandomized")
        {
            const auto order = s.random_order ? detail::random_permutation(g.n(), seed) : identity_order(g.n());
            auto r = derandomized_decomposition(g, order, std::nullopt, dopt);
            out.solution = report::decomposition_solution(r.decomposition);
            out.flags = r.total_flags;
            out.trace = std::move(r.trace);
            m["colors_used"] = detail::colors_used(r.decomposition.color);
            m["c_bound"] = r.decomposition.c_bound;
            m["d_bound"] = r.decomposition.d_bound;
            m["trace_steps"] = r.trace_steps;
            m["initial_expectation"] = r.phase_expectation.empty() ? 0.0 : r.phase_expectation.front().to_double();
        }
        else if (s.name == "decompose-coloring")
        {
            const auto d = distance_coloring_decomposition(g, s.radius);
            out.solution = report::decomposition_solution(d, 2 * s.radius);
            m["colors_used"] = detail::colors_used(d.color);
            m["c_bound"] = d.c_bound;
        }
        else if (s.name == "edgecolor")
        {
            const int size = std::max(1, 2 * g.max_degree() - 1) + s.extra;
            auto palettes = apps::random_palettes(g, s.extra, s.universe > 0 ? s.universe : 2 * size, seed);
            const auto c = apps::list_edge_coloring(g, std::move(palettes));
            out.solution = report::edge_coloring_solution(c);
            m["palette_size"] = size;
            m["hyperedges"] = c.hyperedges;
            m["colors_used"] = std::set<int>(c.color.begin(), c.color.end()).size();
        }
        else if (s.name == "approx-matching")
        {
            const auto r = apps::approx_maximum_matching(g, s.eps);
            out.solution = report::graph_matching_solution(r.matching);
            const auto size = std::count_if(r.matching.mate.begin(), r.matching.mate.end(), [](int x) { return x >= 0; }) / 2;
            m["size"] = size;
            m["max_length"] = r.max_length;
            m["guaranteed_ratio"] = r.guaranteed_ratio;
        }
        else if (s.name == "orient")
        {
            const auto lambda = s.lambda ? s.lambda : in.arboricity;
            if (!lambda)
                throw PreconditionError("orient: no arboricity bound (pass lambda or use a certified instance)");
            const auto r = apps::low_outdegree_orientation(g, *lambda, s.eps);
            out.solution = report::orientation_solution(r.orientation, r.budget, false);
            m["lambda"] = *lambda;
            m["budget"] = r.budget;
            m["max_out_degree"] = r.orientation.max_out_degree(g.n());
            m["iterations"] = r.iterations;
        }
        else if (s.name == "defective")
        {
            apps::DefectiveOptions o;
            o.K = s.K;
            o.final_factor = s.final_factor;
            o.seed = seed;
            o.danger.neighborhood_cap = caps.neighborhood;
            o.danger.marginal = mopt;
            o.shatter = detail::shatter_options(s, caps, seed);
            o.mt_max_steps = caps.mt_max_steps;
            const auto r = apps::defective_coloring(g, s.h, o);
            out.solution = report::vertex_coloring_solution(r.coloring);
            m["k"] = r.coloring.k;
            m["max_degree"] = r.max_degree;
            m["ratio"] = r.ratio;
            m["max_defect"] = apps::max_defect(g, r.coloring.color);
            std::size_t residual = 0;
            for (const auto& st : r.stages)
                residual += st.residual_events;
            m["residual_events"] = residual;
        }
        else if (s.name == "sinkless")
        {
            const auto r = apps::sinkless_orientation(g, seed);
            out.solution = report::orientation_solution(r.orientation, std::nullopt, true);
            out.component_sizes = r.bad_component_sizes;
            long long bad = 0;
            for (int c : r.bad_component_sizes)
                bad += c;
            m["bad_nodes"] = bad;
            m["pass2_skipped"] = r.pass2_skipped;
            m["borrowed"] = r.borrowed;
        }
        else if (s.name == "cycle-marking")
        {
            if (s.derandomized)
                apps::cycle_marking_derandomize(g.n());
            const auto r = apps::cycle_marking_demo(g.n(), seed);
            m["count"] = r.count;
            m["expected"] = r.expected;
            m["within_tolerance"] = r.within_tolerance;
        }
        else if (s.name == "split")
        {
            SplitOptions o;
            o.delta = s.delta;
            o.exact_oracle = s.exact_oracle;
            o.oracle = dopt.oracle;
            const SplitMode mode = s.derandomized ? SplitMode{DerandomizedSplit{}} : SplitMode{RandomizedSplit{seed}};
            auto r = degree_split(in.hypergraph, s.eps, mode, o);
            out.solution = report::splitting_solution(r);
            out.flags = r.total_flags;
            out.trace = std::move(r.trace);
            m["delta"] = r.delta;
            m["virtual_nodes"] = r.virtual_nodes;
            m["constrained_virtual"] = r.constrained_virtual;
            m["red_edges"] = r.red_edges().size();
            if (r.initial_expectation)
                m["initial_expectation"] = r.initial_expectation->to_double();
            m["trace_steps"] = r.trace_steps;
        }
        else if (s.name == "match")
        {
            const auto r = hypergraph_maximal_matching(in.hypergraph);
            out.solution = report::hypergraph_matching_solution(r.matching);
            m["size"] = r.matching.size();
            m["direct"] = r.direct;
            m["split_rounds"] = r.split_rounds;
            m["fallbacks"] = r.fallbacks;
        }
        else if (s.name == "mt")
        {
            const auto r = lll::moser_tardos(*in.cnf, seed, lll::MTOptions{s.mt_mode, caps.mt_max_steps});
            if (r.solved)
                out.solution = report::assignment_solution(r.assignment);
            m["solved"] = r.solved;
            m["timed_out"] = r.timed_out;
            m["steps"] = r.steps;
            m["rounds"] = r.rounds;
        }
        else if (s.name == "alg1")
        {
            const auto& inst = *in.cnf;
            const auto fr = lll::algorithm1_freeze(inst, seed, mopt);
            m["frozen"] = std::count(fr.frozen.begin(), fr.frozen.end(), 1);
            m["colors"] = fr.colors;
            m["threshold"] = fr.threshold;
            m["max_marginal"] = fr.max_marginal;
            m["within_bound"] = fr.within_marginal_bound;
            const auto sh = lll::shattering_solve(inst, fr.residual, fr.partial, detail::shatter_options(s, caps, seed));
            detail::shatter_metrics(out, inst, fr.residual, sh);
        }
        else if (s.name == "alg2")
        {
            const auto& inst = *in.cnf;
            const auto r = lll::algorithm2_dangerous(inst, seed, lll::DangerOptions{caps.neighborhood, mopt});
            m["dangerous"] = r.dangerous.size();
            m["q"] = r.q;
            const auto sh = lll::shattering_solve(inst, r.residual, r.partial, detail::shatter_options(s, caps, seed));
            detail::shatter_metrics(out, inst, r.residual, sh);
        }
        else if (s.name == "ksat")
        {
            apps::KsatOptions o;
            o.seed = seed;
            o.danger = lll::DangerOptions{caps.neighborhood, mopt};
            o.shatter = detail::shatter_options(s, caps, seed);
            const auto r = apps::ksat_solve(*in.cnf, o);
            if (r.assignment)
                out.solution = report::assignment_solution(*r.assignment);
            out.component_sizes = r.component_sizes;
            m["width"] = r.width;
            m["d"] = r.d;
            m["dangerous"] = r.dangerous;
            m["residual_events"] = r.residual;
            m["fragility_criterion"] = r.fragility_criterion;
            m["classic_criterion"] = r.classic_criterion;
            m["solved"] = r.assignment.has_value();
        }
        else
            throw PreconditionError("run_algorithm: unknown algorithm '" + s.name + "'");
        return out;
    }

    inline std::string error_kind(const std::exception& e)
    {
        if (dynamic_cast<const CapacityError*>(&e))
            return "capacity";
        if (dynamic_cast<const BudgetExceeded*>(&e))
            return "budget";
        if (dynamic_cast<const NotLocallyCheckable*>(&e))
            return "not-locally-checkable";
        if (dynamic_cast<const PostconditionViolation*>(&e))
            return "postcondition";
        if (dynamic_cast<const PreconditionError*>(&e))
            return "precondition";
        if (dynamic_cast<const GeneratorError*>(&e))
            return "generator";
        if (dynamic_cast<const MalformedInput*>(&e))
            return "malformed-input";
        if (dynamic_cast<const Error*>(&e))
            return "error";
        return "internal";
    }

    // ------------------------------------------------------------ configs and reports

    struct ExperimentConfig
    {
        std::string name = "experiment";
        std::optional<GeneratorSpec> generator;
        std::optional<std::string> file;
        InputKind kind = InputKind::Graph;
        std::string algorithm;
        Json params = Json::object();
        AlgorithmSpec spec;
        std::uint64_t first_seed = 1;
        std::uint64_t seed_count = 1;
        int trials = 1;
        bool validate = true;
        int workers = 1;
        Caps caps;
        bool timings = false;
        std::string records_path;
        std::string summary_path;
        std::string csv_dir;
    };

    /// Relative paths in `j` resolve against `base`.
    inline ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base = {})
    {
        ParamReader top(j, "");
        ExperimentConfig c;
        c.name = top.text("name", std::string("experiment"));

        const Json* inst = top.raw("instance");
        if (!inst)
            throw ConfigError("instance: required");
        if (!inst->is_object())
            throw ConfigError("instance: expected an object");
        if (inst->contains("generator") == inst->contains("file"))
            throw ConfigError("instance: give exactly one of 'generator' or 'file'");
        if (inst->contains("generator"))
        {
            c.generator = parse_generator(*inst, "instance");
            c.kind = c.generator->kind;
        }
        else
        {
            ParamReader r(*inst, "instance");
            auto f = std::filesystem::path(r.text("file", std::nullopt));
            c.file = (f.is_relative() && !base.empty() ? base / f : f).string();
            c.kind = parse_kind(r.text("kind", std::nullopt), "instance.kind");
            r.finish();
        }

        const Json* alg = top.raw("algorithm");
        if (!alg)
            throw ConfigError("algorithm: required");
        {
            ParamReader r(*alg, "algorithm");
            c.algorithm = r.text("name", std::nullopt);
            if (const Json* p = r.raw("params"))
                c.params = *p;
            r.finish();
        }
        if (!detail::algorithms().count(c.algorithm))
            throw ConfigError("algorithm.name: unknown algorithm '" + c.algorithm + "'");
        c.spec = parse_algorithm(c.algorithm, c.params, "algorithm.params");
        if (c.spec.kind != c.kind)
            throw ConfigError("algorithm.name: '" + c.algorithm + "' needs a " + to_string(c.spec.kind) + " instance, got " +
                              to_string(c.kind));

        {
            ParamReader r(top.raw("seeds") ? *top.raw("seeds") : Json::object(), "seeds");
            c.first_seed = r.seed("first", 1);
            c.seed_count = static_cast<std::uint64_t>(r.integer("count", 1, 0, 100'000'000));
            r.finish();
        }
        c.trials = static_cast<int>(top.integer("trials", 1, 1, 1'000'000));
        c.validate = top.boolean("validate", true);
        c.workers = static_cast<int>(top.integer("workers", 1, 1, 1024));
        c.timings = top.boolean("timings", false);
        {
            ParamReader r(top.raw("caps") ? *top.raw("caps") : Json::object(), "caps");
            c.caps.enumeration = static_cast<std::uint64_t>(r.integer("enumeration", static_cast<long long>(c.caps.enumeration), 1, 1LL << 40));
            c.caps.neighborhood = static_cast<int>(r.integer("neighborhood", c.caps.neighborhood, 1, 62));
            c.caps.search_budget = static_cast<std::uint64_t>(r.integer("search_budget", static_cast<long long>(c.caps.search_budget), 1, 1LL << 50));
            c.caps.mt_max_steps = static_cast<std::size_t>(r.integer("mt_max_steps", static_cast<long long>(c.caps.mt_max_steps), 1, 1LL << 50));
            r.finish();
        }
        {
            ParamReader r(top.raw("output") ? *top.raw("output") : Json::object(), "output");
            auto resolve = [&](const std::string& key) {
                const auto p = std::filesystem::path(r.text(key, std::string()));
                return p.empty() || p.is_absolute() || base.empty() ? p.string() : (base / p).string();
            };
            c.records_path = resolve("records");
            c.summary_path = resolve("summary");
            c.csv_dir = resolve("csv_dir");
            r.finish();
        }
        top.finish();
        return c;
    }

    struct Report
    {
        Json header;
        std::vector<Json> records;
        Json summary;
        std::string component_csv;
        std::string trace_csv;

        std::string records_jsonl() const
        {
            std::string out = header.dump() + '\n';
            for (const auto& r : records)
                out += r.dump() + '\n';
            return out;
        }
    };

    /// Aggregates over the successful records; recomputable from the records alone.
    inline Json summarize(const ExperimentConfig& c, const std::vector<Json>& records)
    {
        std::size_t ok = 0, errors = 0, valid = 0, invalid = 0, unchecked = 0;
        std::map<std::string, std::vector<double>> series;
        std::map<std::string, std::size_t> error_kinds;
        for (const auto& r : records)
        {
            if (r.at("status") == "error")
            {
                ++errors;
                ++error_kinds[r.at("error_kind").get<std::string>()];
                continue;
            }
            ++ok;
            if (!r.contains("valid"))
                ++unchecked;
            else if (r.at("valid").get<bool>())
                ++valid;
            else
                ++invalid;
            if (r.contains("flags"))
                series["flags"].push_back(r.at("flags").get<double>());
            for (const auto& [k, v] : r.at("metrics").items())
            {
                if (v.is_boolean())
                    series[k].push_back(v.get<bool>() ? 1.0 : 0.0);
                else if (v.is_number())
                    series[k].push_back(v.get<double>());
            }
        }
        Json s;
        s["name"] = c.name;
        s["algorithm"] = c.algorithm;
        s["params"] = c.params;
        s["seeds"] = Json{{"first", c.first_seed}, {"count", c.seed_count}};
        s["trials"] = c.trials;
        s["records"] = records.size();
        s["ok"] = ok;
        s["errors"] = errors;
        s["error_kinds"] = error_kinds;
        s["valid"] = valid;
        s["invalid"] = invalid;
        s["unchecked"] = unchecked;
        Json agg = Json::object();
        for (const auto& [k, xs] : series)
            agg[k] = report::to_json(report::aggregate(xs));
        s["metrics"] = std::move(agg);
        return s;
    }

    inline Report run_experiment(const ExperimentConfig& c)
    {
        std::optional<LoadedInstance> fixed;
        if (c.file)
            fixed = load_instance_text(report::read_file(*c.file), c.kind);
        else if (c.generator->seed)
            fixed = generate_instance(*c.generator, *c.generator->seed);

        const auto total = static_cast<std::size_t>(c.seed_count) * static_cast<std::size_t>(c.trials);
        struct Slot
        {
            Json record;
            std::vector<int> sizes;
            std::vector<TraceRecord> trace;
        };
        std::vector<Slot> slots(total);
        parallel_for(total, c.workers, [&](std::size_t i) {
            const std::uint64_t seed = c.first_seed + i / static_cast<std::size_t>(c.trials);
            const auto trial = i % static_cast<std::size_t>(c.trials);
            auto& slot = slots[i];
            Json rec;
            rec["seed"] = seed;
            rec["trial"] = trial;
            const auto t0 = std::chrono::steady_clock::now();
            try
            {
                const LoadedInstance inst = fixed ? *fixed : generate_instance(*c.generator, seed);
                rec["instance"] = Json{{"kind", to_string(inst.kind)}, {"size", inst.size()}, {"items", inst.items()}};
                auto out = run_algorithm(c.spec, inst, trial_seed(seed, trial), c.caps);
                rec["status"] = "ok";
                if (out.flags)
                    rec["flags"] = *out.flags;
                rec["produced_solution"] = out.solution.has_value();
                if (c.validate && out.solution)
                {
                    const auto chk = report::check_solution(inst.text, *out.solution);
                    rec["valid"] = chk.valid;
                    if (!chk.valid)
                    {
                        std::vector<std::string> first(chk.violations.begin(),
                                                       chk.violations.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(chk.violations.size(), 5)));
                        rec["violations"] = first;
                    }
                }
                rec["metrics"] = std::move(out.metrics);
                if (!out.component_sizes.empty())
                    rec["component_histogram"] = report::histogram(out.component_sizes);
                if (!out.trace.empty())
                    rec["trace_steps"] = out.trace.size();
                slot.sizes = std::move(out.component_sizes);
                slot.trace = std::move(out.trace);
            }
            catch (const std::exception& e)
            {
                rec["status"] = "error";
                rec["error_kind"] = error_kind(e);
                rec["error"] = e.what();
            }
            if (c.timings)
                rec["time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            slot.record = std::move(rec);
        });

        Report rep;
        rep.header = Json{{"type", "header"},
                          {"name", c.name},
                          {"algorithm", c.algorithm},
                          {"params", c.params},
                          {"instance", c.file ? Json{{"file", *c.file}, {"kind", to_string(c.kind)}}
                                              : Json{{"generator", c.generator->name}, {"args", c.generator->args}}},
                          {"seeds", Json{{"first", c.first_seed}, {"count", c.seed_count}}},
                          {"trials", c.trials}};
        report::CsvTable sizes({"seed", "trial", "size", "count"});
        report::CsvTable trace({"seed", "trial", "step", "node", "bit", "value", "before", "after", "before_exact", "after_exact"});
        for (auto& s : slots)
        {
            const auto seed = std::to_string(s.record.at("seed").get<std::uint64_t>());
            const auto trial = std::to_string(s.record.at("trial").get<std::size_t>());
            for (const auto& [size, count] : report::histogram(s.sizes))
                sizes.add({seed, trial, std::to_string(size), std::to_string(count)});
            for (const auto& t : s.trace)
            {
                std::ostringstream b, a;
                b.precision(17);
                a.precision(17);
                b << t.before.to_double();
                a << t.after.to_double();
                trace.add({seed, trial, std::to_string(t.step), std::to_string(t.node), std::to_string(t.bit), std::to_string(t.value),
                           b.str(), a.str(), t.before.str(), t.after.str()});
            }
            rep.records.push_back(std::move(s.record));
        }
        rep.component_csv = sizes.str();
        rep.trace_csv = trace.str();
        rep.summary = summarize(c, rep.records);
        if (c.timings)
        {
            const auto now = std::time(nullptr);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            rep.summary["generated_at"] = buf;
        }

        if (!c.records_path.empty())
            report::write_atomic(c.records_path, rep.records_jsonl());
        if (!c.summary_path.empty())
            report::write_atomic(c.summary_path, rep.summary.dump(2) + '\n');
        if (!c.csv_dir.empty())
        {
            report::write_atomic(std::filesystem::path(c.csv_dir) / "component_sizes.csv", rep.component_csv);
            report::write_atomic(std::filesystem::path(c.csv_dir) / "ce_trace.csv", rep.trace_csv);
        }
        return rep;
    }

    inline Report run_experiment(const Json& config, const std::filesystem::path& base = {})
    {
        return run_experiment(parse_config(config, base));
    }

} // namespace dlocal::experiment
