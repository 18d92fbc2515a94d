#pragma once

#include "dlocal/graph_io.hpp"
#include "dlocal/records.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace dlocal::report
{
    /// DIMACS when the first non-comment line is a "p" header, the event format when it opens
    /// with a declaration keyword.
    inline lll::Instance parse_cnf_text(const std::string& text)
    {
        std::istringstream probe(text);
        std::string line;
        while (std::getline(probe, line))
        {
            std::istringstream ls(line);
            std::string tok;
            if (!(ls >> tok) || tok[0] == '#' || tok[0] == 'c' || tok[0] == '%')
                continue;
            std::istringstream in(text);
            if (tok == "p")
                return lll::parse_dimacs(in);
            return lll::parse_instance(in);
        }
        throw MalformedInput("cnf: empty input");
    }

    struct CheckResult
    {
        bool valid = true;
        std::vector<std::string> violations;

        void fail(std::string msg)
        {
            valid = false;
            violations.push_back(std::move(msg));
        }
    };

    namespace detail
    {
        template <class T>
        T field(const Json& sol, const char* key)
        {
            if (!sol.contains(key))
                throw MalformedInput(std::string("solution: missing field '") + key + "'");
            try
            {
                return sol.at(key).get<T>();
            }
            catch (const nlohmann::json::exception& e)
            {
                throw MalformedInput(std::string("solution: field '") + key + "': " + e.what());
            }
        }

        inline Graph graph_of(const std::string& text)
        {
            std::istringstream in(text);
            return io::read_graph(in);
        }

        inline Hypergraph hypergraph_of(const std::string& text)
        {
            std::istringstream in(text);
            return io::read_hypergraph(in);
        }

        inline std::string edge_name(const std::vector<Edge>& es, int e)
        {
            const auto& [u, v] = es[static_cast<std::size_t>(e)];
            return "edge " + std::to_string(e) + " {" + std::to_string(u) + "," + std::to_string(v) + "}";
        }
    } // namespace detail

    /// Checks a solution document against the instance text it claims to solve.
    inline CheckResult check_solution(const std::string& input_text, const Json& sol)
    {
        CheckResult r;
        const auto kind = detail::field<std::string>(sol, "kind");
        if (kind == "edge-coloring")
        {
            const Graph g = detail::graph_of(input_text);
            apps::EdgeColoring c;
            c.color = detail::field<std::vector<int>>(sol, "colors");
            c.palettes = detail::field<std::vector<std::vector<int>>>(sol, "palettes");
            const auto es = g.edges();
            if (c.color.size() != es.size() || c.palettes.size() != es.size())
            {
                r.fail("expected " + std::to_string(es.size()) + " colors and palettes");
                return r;
            }
            const auto rep = apps::validate_list_edge_coloring(g, c);
            if (rep.uncolored)
                r.fail(detail::edge_name(es, *rep.uncolored) + " is uncolored");
            if (rep.off_palette)
                r.fail(detail::edge_name(es, *rep.off_palette) + " uses a color outside its palette");
            if (rep.conflict)
                r.fail(detail::edge_name(es, rep.conflict->first) + " and " + detail::edge_name(es, rep.conflict->second) +
                       " share color " + std::to_string(c.color[static_cast<std::size_t>(rep.conflict->first)]));
        }
        else if (kind == "vertex-coloring")
        {
            const Graph g = detail::graph_of(input_text);
            const auto color = detail::field<std::vector<int>>(sol, "colors");
            const int h = sol.value("defect", 0);
            if (color.size() != static_cast<std::size_t>(g.n()))
            {
                r.fail("expected " + std::to_string(g.n()) + " colors");
                return r;
            }
            const int k = sol.value("k", -1);
            for (int v = 0; v < g.n(); ++v)
            {
                const int c = color[static_cast<std::size_t>(v)];
                int same = 0;
                for (int w : g.neighbors(v))
                    same += color[static_cast<std::size_t>(w)] == c;
                if (same > h)
                    r.fail("node " + std::to_string(v) + " has " + std::to_string(same) + " neighbors of its color " +
                           std::to_string(c) + " (allowed " + std::to_string(h) + ")");
                if (c < 0 || (k >= 0 && c >= k))
                    r.fail("node " + std::to_string(v) + " has color " + std::to_string(c) + " outside 0.." + std::to_string(k - 1));
            }
        }
        else if (kind == "orientation")
        {
            const Graph g = detail::graph_of(input_text);
            apps::Orientation o;
            for (const auto& a : detail::field<std::vector<std::vector<int>>>(sol, "arcs"))
            {
                if (a.size() != 2)
                    throw MalformedInput("solution: arcs must be [tail, head] pairs");
                o.arcs.emplace_back(a[0], a[1]);
            }
            if (!apps::is_orientation_of(g, o))
            {
                r.fail("arcs do not orient each edge of the graph exactly once, in edge order");
                return r;
            }
            const auto out = o.out_degrees(g.n());
            if (sol.contains("max_out_degree"))
            {
                const int bound = detail::field<int>(sol, "max_out_degree");
                for (int v = 0; v < g.n(); ++v)
                    if (out[static_cast<std::size_t>(v)] > bound)
                        r.fail("node " + std::to_string(v) + " has out-degree " + std::to_string(out[static_cast<std::size_t>(v)]) +
                               " > " + std::to_string(bound));
            }
            if (sol.value("sinkless", false))
                for (int v = 0; v < g.n(); ++v)
                    if (out[static_cast<std::size_t>(v)] == 0)
                        r.fail("node " + std::to_string(v) + " is a sink");
        }
        else if (kind == "graph-matching")
        {
            const Graph g = detail::graph_of(input_text);
            apps::GraphMatching m{detail::field<std::vector<int>>(sol, "mate")};
            if (m.mate.size() != static_cast<std::size_t>(g.n()) || !apps::is_graph_matching(g, m))
            {
                r.fail("mate array is not a matching of the graph");
                return r;
            }
            if (sol.contains("min_size"))
            {
                const auto size = std::count_if(m.mate.begin(), m.mate.end(), [](int x) { return x >= 0; }) / 2;
                const int need = detail::field<int>(sol, "min_size");
                if (size < need)
                    r.fail("matching has " + std::to_string(size) + " edges, required " + std::to_string(need));
            }
        }
        else if (kind == "hypergraph-matching")
        {
            const Hypergraph h = detail::hypergraph_of(input_text);
            const auto m = detail::field<std::vector<int>>(sol, "edges");
            for (int e : m)
                if (e < 0 || static_cast<std::size_t>(e) >= h.m())
                {
                    r.fail("hyperedge index " + std::to_string(e) + " out of range");
                    return r;
                }
            const auto rep = validate_matching(h, m);
            if (rep.overlap)
                r.fail("hyperedges " + std::to_string(rep.overlap->first) + " and " + std::to_string(rep.overlap->second) +
                       " share a vertex");
            if (rep.free_edge)
                r.fail("hyperedge " + std::to_string(*rep.free_edge) + " could be added (not maximal)");
        }
        else if (kind == "splitting")
        {
            const Hypergraph h = detail::hypergraph_of(input_text);
            const auto colors = detail::field<std::string>(sol, "colors");
            std::vector<EdgeColor> c;
            for (char ch : colors)
            {
                if (ch != 'R' && ch != 'B')
                    throw MalformedInput("solution: splitting colors must be R or B");
                c.push_back(ch == 'R' ? EdgeColor::Red : EdgeColor::Blue);
            }
            if (c.size() != h.m())
            {
                r.fail("expected " + std::to_string(h.m()) + " edge colors");
                return r;
            }
            const auto eps = detail::field<double>(sol, "eps");
            const auto delta = detail::field<double>(sol, "delta");
            const auto rep = validate_splitting(h, c, eps, delta);
            for (int v : rep.violations)
                r.fail("vertex " + std::to_string(v) + " of degree " + std::to_string(h.degree(v)) + " is not split within eps");
        }
        else if (kind == "decomposition")
        {
            const Graph g = detail::graph_of(input_text);
            NetworkDecomposition d;
            d.color = detail::field<std::vector<int>>(sol, "color");
            d.cluster = detail::field<std::vector<int>>(sol, "cluster");
            d.d_bound = detail::field<int>(sol, "d_bound");
            d.c_bound = detail::field<int>(sol, "c_bound");
            const auto mode = sol.value("mode", std::string("weak"));
            if (mode != "weak" && mode != "strong")
                throw MalformedInput("solution: mode must be weak or strong");
            d.mode = mode == "weak" ? DiameterMode::Weak : DiameterMode::Strong;
            const int power = sol.value("power", 1);
            const auto rep = validate_decomposition(power == 1 ? g : power_graph(g, power), d);
            for (const auto& v : rep.violations)
                r.fail(v);
        }
        else if (kind == "assignment")
        {
            const auto inst = parse_cnf_text(input_text);
            const auto x = detail::field<std::vector<int>>(sol, "values");
            if (x.size() != inst.var_count())
            {
                r.fail("expected " + std::to_string(inst.var_count()) + " values");
                return r;
            }
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] < 0 || static_cast<std::size_t>(x[i]) >= inst.variable(static_cast<int>(i)).weights.size())
                {
                    r.fail("variable " + std::to_string(i) + " has value " + std::to_string(x[i]) + " outside its range");
                    return r;
                }
            for (int b : lll::violated_events(inst, x))
                r.fail("event " + std::to_string(inst.event(b).id) + " holds");
        }
        else
            throw MalformedInput("solution: unknown kind '" + kind + "'");
        return r;
    }

} // namespace dlocal::report
