#pragma once

#include "dlocal/applications.hpp"
#include "dlocal/decomposition.hpp"
#include "dlocal/derandomize.hpp"
#include "dlocal/errors.hpp"
#include "dlocal/hypergraph_matching.hpp"
#include "dlocal/lll.hpp"
#include "dlocal/numeric.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace dlocal::report
{
    using Json = nlohmann::ordered_json;

    /// Writes to `path.tmp` and renames over `path`, so readers never see a partial file.
    inline void write_atomic(const std::filesystem::path& path, const std::string& content)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw Error("cannot open " + tmp.string() + " for writing");
            out << content;
            out.flush();
            if (!out)
                throw Error("write to " + tmp.string() + " failed");
        }
        std::filesystem::rename(tmp, path);
    }

    inline std::string read_file(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw MalformedInput("cannot open " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    /// Exact value as a string plus a double for plotting.
    inline Json dyadic_json(const Dyadic& d) { return Json{{"exact", d.str()}, {"value", d.to_double()}}; }

    struct Aggregate
    {
        std::size_t count = 0;
        double mean = 0;
        double stderr_ = 0; // sample standard deviation / sqrt(count); 0 below two samples
    };

    inline Aggregate aggregate(std::span<const double> xs)
    {
        Aggregate a;
        a.count = xs.size();
        if (xs.empty())
            return a;
        double sum = 0;
        for (double x : xs)
            sum += x;
        a.mean = sum / static_cast<double>(xs.size());
        if (xs.size() >= 2)
        {
            double ss = 0;
            for (double x : xs)
                ss += (x - a.mean) * (x - a.mean);
            a.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
        }
        return a;
    }

    inline Json to_json(const Aggregate& a) { return Json{{"count", a.count}, {"mean", a.mean}, {"stderr", a.stderr_}}; }

    /// Minimal CSV: fields containing a comma, quote or newline are quoted.
    class CsvTable
    {
    public:
        explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

        void add(std::vector<std::string> row)
        {
            if (row.size() != header_.size())
                throw PreconditionError("csv: row has " + std::to_string(row.size()) + " fields, header has " +
                                        std::to_string(header_.size()));
            rows_.push_back(std::move(row));
        }

        std::size_t rows() const noexcept { return rows_.size(); }

        std::string str() const
        {
            std::string out;
            auto line = [&](const std::vector<std::string>& r) {
                for (std::size_t i = 0; i < r.size(); ++i)
                {
                    if (i)
                        out += ',';
                    out += quote(r[i]);
                }
                out += '\n';
            };
            line(header_);
            for (const auto& r : rows_)
                line(r);
            return out;
        }

    private:
        static std::string quote(const std::string& f)
        {
            if (f.find_first_of(",\"\n") == std::string::npos)
                return f;
            std::string q = "\"";
            for (char c : f)
            {
                if (c == '"')
                    q += '"';
                q += c;
            }
            return q + '"';
        }

        std::vector<std::string> header_;
        std::vector<std::vector<std::string>> rows_;
    };

    inline Json trace_json(std::span<const TraceRecord> trace)
    {
        Json rows = Json::array();
        for (const auto& t : trace)
            rows.push_back(Json{{"step", t.step},
                                {"node", t.node},
                                {"bit", t.bit},
                                {"value", t.value},
                                {"before", t.before.str()},
                                {"after", t.after.str()}});
        return rows;
    }

    inline std::string trace_jsonl(std::span<const TraceRecord> trace)
    {
        std::string out;
        for (const auto& row : trace_json(trace))
            out += row.dump() + '\n';
        return out;
    }

    inline std::map<int, int> histogram(std::span<const int> sizes)
    {
        std::map<int, int> h;
        for (int s : sizes)
            ++h[s];
        return h;
    }

    // ------------------------------------------------------------ solution documents
    // Each carries a "kind" the validator dispatches on.

    inline Json edge_coloring_solution(const apps::EdgeColoring& c)
    {
        return Json{{"kind", "edge-coloring"}, {"colors", c.color}, {"palettes", c.palettes}};
    }

    inline Json vertex_coloring_solution(const apps::VertexColoring& c)
    {
        return Json{{"kind", "vertex-coloring"}, {"colors", c.color}, {"k", c.k}, {"defect", c.h}};
    }

    inline Json orientation_solution(const apps::Orientation& o, std::optional<int> bound, bool sinkless)
    {
        Json arcs = Json::array();
        for (const auto& [t, h] : o.arcs)
            arcs.push_back(Json::array({t, h}));
        Json j{{"kind", "orientation"}, {"arcs", std::move(arcs)}, {"sinkless", sinkless}};
        if (bound)
            j["max_out_degree"] = *bound;
        return j;
    }

    inline Json hypergraph_matching_solution(const Matching& m) { return Json{{"kind", "hypergraph-matching"}, {"edges", m}}; }

    inline Json graph_matching_solution(const apps::GraphMatching& m, std::optional<int> at_least = std::nullopt)
    {
        Json j{{"kind", "graph-matching"}, {"mate", m.mate}};
        if (at_least)
            j["min_size"] = *at_least;
        return j;
    }

    inline Json splitting_solution(const Splitting& s)
    {
        std::string colors;
        for (auto c : s.color)
            colors += c == EdgeColor::Red ? 'R' : 'B';
        return Json{{"kind", "splitting"}, {"colors", colors}, {"eps", s.eps}, {"delta", s.delta}};
    }

    inline Json decomposition_solution(const NetworkDecomposition& d, int power = 1)
    {
        return Json{{"kind", "decomposition"}, {"color", d.color},       {"cluster", d.cluster},
                    {"d_bound", d.d_bound},    {"c_bound", d.c_bound},   {"mode", to_string(d.mode)}, {"power", power}};
    }

    inline Json assignment_solution(const lll::Assignment& x) { return Json{{"kind", "assignment"}, {"values", x}}; }

} // namespace dlocal::report
