#pragma once

#include "dlocal/graph.hpp"
#include "dlocal/hypergraph.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

// Text format: header "n m" (graphs) or "n m rank" (hypergraphs), then one edge per line.

namespace dlocal::io
{
    namespace detail
    {
        inline bool next_content_line(std::istream& in, std::string& line)
        {
            while (std::getline(in, line))
            {
                const auto p = line.find_first_not_of(" \t\r");
                if (p == std::string::npos || line[p] == '#')
                    continue;
                return true;
            }
            return false;
        }

        inline std::vector<long long> parse_ints(const std::string& line, int lineno)
        {
            std::istringstream ss(line);
            std::vector<long long> out;
            std::string tok;
            while (ss >> tok)
            {
                std::size_t used = 0;
                long long v = 0;
                try
                {
                    v = std::stoll(tok, &used);
                }
                catch (const std::exception&)
                {
                    used = 0;
                }
                if (used != tok.size())
                    throw MalformedInput("line " + std::to_string(lineno) + ": bad integer '" + tok + "'");
                out.push_back(v);
            }
            return out;
        }
    } // namespace detail

    inline void write_graph(std::ostream& out, const Graph& g)
    {
        const auto es = g.edges();
        out << g.n() << ' ' << es.size() << '\n';
        for (const auto& [u, v] : es)
            out << u << ' ' << v << '\n';
    }

    inline Graph read_graph(std::istream& in)
    {
        std::string line;
        int lineno = 1;
        if (!detail::next_content_line(in, line))
            throw MalformedInput("graph: missing header");
        const auto hdr = detail::parse_ints(line, lineno);
        if (hdr.size() != 2 || hdr[0] < 0 || hdr[1] < 0)
            throw MalformedInput("graph: header must be 'n m'");
        std::vector<Edge> es;
        for (long long i = 0; i < hdr[1]; ++i)
        {
            ++lineno;
            if (!detail::next_content_line(in, line))
                throw MalformedInput("graph: expected " + std::to_string(hdr[1]) + " edges");
            const auto e = detail::parse_ints(line, lineno);
            if (e.size() != 2)
                throw MalformedInput("graph: line " + std::to_string(lineno) + " must hold two endpoints");
            es.emplace_back(static_cast<int>(e[0]), static_cast<int>(e[1]));
        }
        return build_graph(static_cast<std::size_t>(hdr[0]), es);
    }

    inline void write_hypergraph(std::ostream& out, const Hypergraph& h)
    {
        out << h.n() << ' ' << h.m() << ' ' << h.rank() << '\n';
        for (const auto& e : h.edges())
        {
            for (std::size_t i = 0; i < e.size(); ++i)
                out << (i ? " " : "") << e[i];
            out << '\n';
        }
    }

    inline Hypergraph read_hypergraph(std::istream& in)
    {
        std::string line;
        int lineno = 1;
        if (!detail::next_content_line(in, line))
            throw MalformedInput("hypergraph: missing header");
        const auto hdr = detail::parse_ints(line, lineno);
        if ((hdr.size() != 2 && hdr.size() != 3) || hdr[0] < 0 || hdr[1] < 0)
            throw MalformedInput("hypergraph: header must be 'n m' or 'n m rank'");
        std::vector<std::vector<int>> es;
        for (long long i = 0; i < hdr[1]; ++i)
        {
            ++lineno;
            if (!detail::next_content_line(in, line))
                throw MalformedInput("hypergraph: expected " + std::to_string(hdr[1]) + " edges");
            std::vector<int> e;
            for (long long v : detail::parse_ints(line, lineno))
                e.push_back(static_cast<int>(v));
            es.push_back(std::move(e));
        }
        Hypergraph h(static_cast<int>(hdr[0]), std::move(es));
        if (hdr.size() == 3 && hdr[2] != h.rank())
            throw MalformedInput("hypergraph: declared rank " + std::to_string(hdr[2]) + " but edges have rank " +
                                 std::to_string(h.rank()));
        return h;
    }

    inline std::string to_string(const Graph& g)
    {
        std::ostringstream s;
        write_graph(s, g);
        return s.str();
    }

    inline std::string to_string(const Hypergraph& h)
    {
        std::ostringstream s;
        write_hypergraph(s, h);
        return s.str();
    }

} // namespace dlocal::io
