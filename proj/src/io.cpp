#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "fpf/io.hpp"

namespace fpf {

namespace {

// Shortest round-trip decimal form; keeps CSV diffs stable across runs.
std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_table(std::ostream& os, const RunSpec& spec,
                 const std::vector<std::string>& columns,
                 const std::vector<TableRow>& rows) {
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("write_table: row width does not match column count");
        for (const auto& cell : row)
            if (const auto* s = std::get_if<std::string>(&cell))
                if (s->find_first_of(",\n\"") != std::string::npos)
                    throw std::invalid_argument("write_table: label cells must be comma/quote free");
    }

    if (spec.format == OutFormat::csv) {
        os << "# fpf " << version_string << "\n";
        os << "# command: " << spec.command_line << "\n";
        os << "# seed: " << spec.seed << "\n";
        if (!spec.tolerances.empty()) os << "# tolerances: " << spec.tolerances << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (const auto* v = std::get_if<double>(&row[c]))
                    os << fmt(*v);
                else
                    os << std::get<std::string>(row[c]);
                os << (c + 1 < row.size() ? "," : "\n");
            }
    } else {
        nlohmann::json j;
        j["meta"] = {{"version", version_string},
                     {"command", spec.command_line},
                     {"seed", spec.seed},
                     {"tolerances", spec.tolerances}};
        j["columns"] = columns;
        auto jrows = nlohmann::json::array();
        for (const auto& row : rows) {
            auto jr = nlohmann::json::array();
            for (const auto& cell : row) {
                if (const auto* v = std::get_if<double>(&cell))
                    jr.push_back(*v);
                else
                    jr.push_back(std::get<std::string>(cell));
            }
            jrows.push_back(std::move(jr));
        }
        j["rows"] = std::move(jrows);
        os << j.dump(2) << "\n";
    }
    os.flush();
}

void write_table(std::ostream& os, const RunSpec& spec,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
    std::vector<TableRow> cells;
    cells.reserve(rows.size());
    for (const auto& row : rows) cells.emplace_back(row.begin(), row.end());
    write_table(os, spec, columns, cells);
}

UniformGridFn load_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_density_csv: cannot open '" + path + "'");

    std::vector<double> xs, vs;
    std::string line;
    bool header_allowed = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x = 0.0, v = 0.0;
        if (!(ls >> x >> v)) {
            // One non-numeric row is tolerated as a column header.
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw std::runtime_error("load_density_csv: unparsable row at line " +
                                     std::to_string(lineno) + " of '" + path + "'");
        }
        header_allowed = false;
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 2)
        throw std::runtime_error("load_density_csv: need at least two data rows in '" + path + "'");

    const double h = xs[1] - xs[0];
    if (!(h > 0.0)) throw std::runtime_error("load_density_csv: abscissae must increase in '" + path + "'");
    for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
        const double d = xs[j + 1] - xs[j];
        if (std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::runtime_error("load_density_csv: ragged spacing near line entry " +
                                     std::to_string(j + 1) + " in '" + path + "'");
    }

    UniformGridFn fn;
    fn.x0 = xs[0];
    fn.h = h;
    fn.values = std::move(vs);
    return fn;
}

}  // namespace fpf
