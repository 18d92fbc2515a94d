// dlocal: command-line front end. Exit codes: 0 success, 1 algorithm failure or invalid
// solution, 2 usage or configuration error.

#include "dlocal/applications.hpp"
#include "dlocal/experiment.hpp"
#include "dlocal/records.hpp"
#include "dlocal/solution_check.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

using namespace dlocal;
using experiment::InputKind;
using report::Json;

namespace
{
    struct UsageError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct Common
    {
        std::string input;
        std::string output;
        std::uint64_t seed = 1;
        std::uint64_t enumeration = std::uint64_t{1} << 20;
        std::uint64_t search_budget = std::uint64_t{1} << 22;
    };

    void add_common(CLI::App* app, Common& c, bool seeded = true)
    {
        app->add_option("--input,-i", c.input, "instance file")->required()->check(CLI::ExistingFile);
        app->add_option("--output,-o", c.output, "solution file (default: stdout)");
        if (seeded)
            app->add_option("--seed", c.seed, "random seed");
        app->add_option("--enumeration-cap", c.enumeration, "completion cap for exact marginals and oracles")->check(CLI::PositiveNumber);
        app->add_option("--search-budget", c.search_budget, "backtracking nodes per residual component")->check(CLI::PositiveNumber);
    }

    void emit(const std::string& path, const std::string& content)
    {
        if (path.empty())
            std::cout << content;
        else
            report::write_atomic(path, content);
    }

    /// Loads the input, runs the named algorithm, writes its solution and prints the metrics.
    int run_one(const std::string& algo, const Json& params, const Common& c)
    {
        const auto spec = experiment::parse_algorithm(algo, params, "options");
        const auto inst = experiment::load_instance_text(report::read_file(c.input), spec.kind);
        experiment::Caps caps;
        caps.enumeration = c.enumeration;
        caps.search_budget = c.search_budget;
        const auto out = experiment::run_algorithm(spec, inst, c.seed, caps);
        if (!out.solution)
        {
            std::cerr << algo << ": no solution produced " << out.metrics.dump() << '\n';
            return 1;
        }
        emit(c.output, out.solution->dump() + '\n');
        if (!c.output.empty())
        {
            Json line = out.metrics;
            if (out.flags)
                line["flags"] = *out.flags;
            std::cout << algo << ' ' << line.dump() << '\n';
        }
        return out.flags && *out.flags > 0 ? 1 : 0;
    }

    std::string dimacs_line(const lll::Assignment& x)
    {
        std::ostringstream s;
        s << 'v';
        for (std::size_t i = 0; i < x.size(); ++i)
            s << ' ' << (x[i] == 1 ? "" : "-") << i + 1;
        s << " 0";
        return s.str();
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic and randomized LOCAL-model algorithms"};
    app.require_subcommand(1);
    Common c;

    // generate
    std::string family;
    std::map<std::string, long long> gen_args;
    std::optional<std::uint64_t> gen_seed;
    auto* generate = app.add_subcommand("generate", "write a generated graph, hypergraph or CNF");
    generate->add_option("family", family, "generator name")->required()->check(CLI::IsMember(experiment::generator_names()));
    for (const char* arg : {"n", "m", "rank", "degree", "max_degree", "attempts", "forests", "width", "height", "k", "overlap", "vars", "max_occ"})
    {
        std::string flag = std::string("--") + arg;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        generate->add_option_function<long long>(flag, [&gen_args, arg](long long v) { gen_args[arg] = v; });
    }
    generate->add_option("--seed", gen_seed, "generator seed");
    std::string gen_output;
    generate->add_option("--output,-o", gen_output, "output file (default: stdout)");

    // split
    double split_eps = 0.5;
    std::optional<double> split_delta;
    std::string split_mode = "derandomized";
    auto* split = app.add_subcommand("split", "(eps, delta) degree splitting of a hypergraph");
    add_common(split, c);
    split->add_option("--eps", split_eps)->check(CLI::Range(0.0, 1.0));
    split->add_option("--delta", split_delta);
    split->add_option("--mode", split_mode)->check(CLI::IsMember({"derandomized", "randomized"}));

    // match
    bool match_graph = false;
    double match_eps = 0.5;
    auto* match = app.add_subcommand("match", "maximal hypergraph matching, or (1-eps)-approximate graph matching with --graph");
    add_common(match, c, false);
    match->add_flag("--graph", match_graph, "input is a graph");
    match->add_option("--eps", match_eps)->check(CLI::Range(0.0, 1.0));

    int ec_extra = 0, ec_universe = 0;
    auto* edgecolor = app.add_subcommand("edgecolor", "list edge coloring from random palettes of size 2 Delta - 1 + extra");
    add_common(edgecolor, c);
    edgecolor->add_option("--extra", ec_extra)->check(CLI::NonNegativeNumber);
    edgecolor->add_option("--universe", ec_universe)->check(CLI::NonNegativeNumber);

    std::optional<int> or_lambda;
    double or_eps = 1.0;
    auto* orient = app.add_subcommand("orient", "orientation with out-degree <= ceil(lambda (1 + eps))");
    add_common(orient, c, false);
    orient->add_option("--lambda", or_lambda, "arboricity bound (default: the file's '# arboricity' line)")->check(CLI::PositiveNumber);
    orient->add_option("--eps", or_eps)->check(CLI::PositiveNumber);

    int def_h = 1;
    double def_K = 100, def_final = 1;
    auto* defective = app.add_subcommand("defective", "h-defective coloring");
    add_common(defective, c);
    defective->add_option("--defect", def_h, "allowed same-colored neighbors h")->check(CLI::PositiveNumber);
    defective->add_option("--K", def_K)->check(CLI::PositiveNumber);
    defective->add_option("--final-factor", def_final)->check(CLI::PositiveNumber);

    std::string lll_algo, lll_mode = "sequential", backend = "exhaustive";
    auto* lll_cmd = app.add_subcommand("lll", "LLL solvers on a CNF or event file");
    lll_cmd->add_option("algorithm", lll_algo)->required()->check(CLI::IsMember({"mt", "alg1", "alg2"}));
    add_common(lll_cmd, c);
    lll_cmd->add_option("--mode", lll_mode, "mt: sequential or parallel")->check(CLI::IsMember({"sequential", "parallel"}));
    lll_cmd->add_option("--backend", backend, "residual solver")->check(CLI::IsMember({"exhaustive", "mt", "derandomized-mt"}));

    auto* sat = app.add_subcommand("sat", "k-SAT via dangerous events and shattering");
    add_common(sat, c);
    sat->add_option("--backend", backend, "residual solver")->check(CLI::IsMember({"exhaustive", "mt", "derandomized-mt"}));

    auto* sinkless = app.add_subcommand("sinkless", "sinkless orientation of a min-degree-3 graph");
    add_common(sinkless, c);

    std::string dec_mode = "derandomized", dec_order = "id";
    int dec_radius = 1;
    auto* decompose = app.add_subcommand("decompose", "network decomposition");
    add_common(decompose, c);
    decompose->add_option("--mode", dec_mode)->check(CLI::IsMember({"randomized", "derandomized", "coloring"}));
    decompose->add_option("--order", dec_order, "derandomized processing order")->check(CLI::IsMember({"id", "random"}));
    decompose->add_option("--radius", dec_radius, "coloring: decompose G^(2 radius)")->check(CLI::PositiveNumber);

    std::string problem, trace_path;
    auto* derand = app.add_subcommand("derandomize", "conditional-expectation derandomization with an exported trace");
    derand->add_option("problem", problem)->required()->check(CLI::IsMember({"split", "decomposition", "cycle-marking"}));
    derand->add_option("--input,-i", c.input, "instance file (not needed for cycle-marking)")->check(CLI::ExistingFile);
    derand->add_option("--output,-o", c.output, "solution file");
    derand->add_option("--trace", trace_path, "trace CSV file");
    derand->add_option("--eps", split_eps)->check(CLI::Range(0.0, 1.0));
    derand->add_option("--delta", split_delta);
    int cycle_n = 64;
    derand->add_option("--n", cycle_n, "cycle length for cycle-marking")->check(CLI::PositiveNumber);

    std::string solution_path;
    auto* validate = app.add_subcommand("validate", "check a solution file against its instance");
    validate->add_option("--input,-i", c.input)->required()->check(CLI::ExistingFile);
    validate->add_option("--solution,-s", solution_path)->required()->check(CLI::ExistingFile);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("--config,-c", config_path)->required()->check(CLI::ExistingFile);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        (void)app.exit(e);
        return 2;
    }

    try
    {
        if (*generate)
        {
            Json spec{{"generator", family}};
            for (const auto& [k, v] : gen_args)
                spec[k] = v;
            if (gen_seed)
                spec["seed"] = *gen_seed;
            const auto g = experiment::parse_generator(spec, "generate");
            const auto inst = experiment::generate_instance(g, gen_seed.value_or(1));
            emit(gen_output, inst.text);
            return 0;
        }
        if (*split)
        {
            Json p{{"eps", split_eps}, {"mode", split_mode}};
            if (split_delta)
                p["delta"] = *split_delta;
            return run_one("split", p, c);
        }
        if (*match)
            return match_graph ? run_one("approx-matching", Json{{"eps", match_eps}}, c) : run_one("match", Json::object(), c);
        if (*edgecolor)
            return run_one("edgecolor", Json{{"extra", ec_extra}, {"universe", ec_universe}}, c);
        if (*orient)
        {
            Json p{{"eps", or_eps}};
            if (or_lambda)
                p["lambda"] = *or_lambda;
            return run_one("orient", p, c);
        }
        if (*defective)
            return run_one("defective", Json{{"h", def_h}, {"K", def_K}, {"final_factor", def_final}}, c);
        if (*lll_cmd)
            return run_one(lll_algo, lll_algo == "mt" ? Json{{"mode", lll_mode}} : Json{{"backend", backend}}, c);
        if (*sinkless)
            return run_one("sinkless", Json::object(), c);
        if (*decompose)
        {
            if (dec_mode == "randomized")
                return run_one("linial-saks", Json::object(), c);
            if (dec_mode == "coloring")
                return run_one("decompose-coloring", Json{{"radius", dec_radius}}, c);
            return run_one("decompose-derandomized", Json{{"order", dec_order}}, c);
        }
        if (*sat)
        {
            const auto phi = report::parse_cnf_text(report::read_file(c.input));
            apps::KsatOptions o;
            o.seed = c.seed;
            o.danger.marginal.cap = c.enumeration;
            o.shatter.search_budget = c.search_budget;
            o.shatter.backend = backend == "mt"                ? lll::ShatterBackend::MT
                                : backend == "derandomized-mt" ? lll::ShatterBackend::DerandomizedMT
                                                               : lll::ShatterBackend::Exhaustive;
            const auto r = apps::ksat_solve(phi, o);
            if (r.assignment)
            {
                if (!lll::satisfies(phi, *r.assignment))
                    throw PostconditionViolation("sat: assignment does not satisfy the formula");
                std::cout << "SAT\n" << dimacs_line(*r.assignment) << '\n';
                if (!c.output.empty())
                    report::write_atomic(c.output, report::assignment_solution(*r.assignment).dump() + '\n');
                return 0;
            }
            std::cout << "UNSOLVED\n"
                      << "c width " << r.width << " d " << r.d << " dangerous " << r.dangerous << " residual " << r.residual << '\n'
                      << "c components";
            for (int s : r.component_sizes)
                std::cout << ' ' << s;
            std::cout << "\nc failure " << r.failure << '\n';
            return 1;
        }
        if (*derand)
        {
            if (problem == "cycle-marking")
            {
                apps::cycle_marking_derandomize(cycle_n);
                return 1; // unreachable: the call above always refuses
            }
            if (c.input.empty())
                throw UsageError("derandomize " + problem + ": --input is required");
            const auto kind = problem == "split" ? InputKind::Hypergraph : InputKind::Graph;
            const auto inst = experiment::load_instance_text(report::read_file(c.input), kind);
            Json p = Json::object();
            if (problem == "split")
            {
                p = Json{{"eps", split_eps}, {"mode", "derandomized"}};
                if (split_delta)
                    p["delta"] = *split_delta;
            }
            const auto spec = experiment::parse_algorithm(problem == "split" ? "split" : "decompose-derandomized", p, "options");
            const auto out = experiment::run_algorithm(spec, inst, 0);
            report::CsvTable t({"step", "node", "bit", "value", "before", "after"});
            for (const auto& r : out.trace)
                t.add({std::to_string(r.step), std::to_string(r.node), std::to_string(r.bit), std::to_string(r.value), r.before.str(),
                       r.after.str()});
            if (!trace_path.empty())
                report::write_atomic(trace_path, t.str());
            if (!c.output.empty())
                report::write_atomic(c.output, out.solution->dump() + '\n');
            std::cout << problem << " steps " << out.trace.size() << " initial "
                      << (out.trace.empty() ? std::string("0") : out.trace.front().before.str()) << " final "
                      << (out.trace.empty() ? std::string("0") : out.trace.back().after.str()) << " flags " << out.flags.value_or(0)
                      << '\n';
            return out.flags.value_or(0) > 0 ? 1 : 0;
        }
        if (*validate)
        {
            Json sol;
            try
            {
                sol = Json::parse(report::read_file(solution_path));
            }
            catch (const nlohmann::json::parse_error& e)
            {
                throw MalformedInput(std::string("solution: ") + e.what());
            }
            const auto r = report::check_solution(report::read_file(c.input), sol);
            if (r.valid)
            {
                std::cout << "VALID\n";
                return 0;
            }
            std::cout << "INVALID\n";
            for (const auto& v : r.violations)
                std::cout << "violation: " << v << '\n';
            return 1;
        }
        if (*run)
        {
            Json cfg;
            try
            {
                cfg = Json::parse(report::read_file(config_path));
            }
            catch (const nlohmann::json::parse_error& e)
            {
                throw ConfigError(std::string("config: ") + e.what());
            }
            const auto parsed = experiment::parse_config(cfg, std::filesystem::path(config_path).parent_path());
            const auto rep = experiment::run_experiment(parsed);
            if (parsed.records_path.empty() && parsed.summary_path.empty())
                std::cout << rep.records_jsonl();
            std::cout << rep.summary.dump() << '\n';
            return 0;
        }
    }
    catch (const UsageError& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const NotLocallyCheckable& e)
    {
        std::cerr << "refused: " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
