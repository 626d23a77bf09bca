// Result serialization: CSV/JSON tables with reproducibility metadata, and
// the tabulated-density loader.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "fpf/grid.hpp"

namespace fpf {

inline constexpr const char* version_string = "0.1.0";

enum class OutFormat { csv, json };

// Everything needed to rerun a command bit-identically.
struct RunSpec {
    std::string command_line;
    std::uint64_t seed = 0;
    std::string tolerances;  // human-readable note on pinned tolerances
    OutFormat format = OutFormat::csv;
};

// Table cells are numbers or bare labels (route names, regimes, ...).
using Cell = std::variant<double, std::string>;
using TableRow = std::vector<Cell>;

// CSV: '#'-prefixed metadata lines, a header row, then data rows.
// JSON: {"meta": {...}, "columns": [...], "rows": [[...], ...]}.
// Doubles are written in shortest round-trip form; string cells must not
// contain commas or newlines (throws std::invalid_argument).
void write_table(std::ostream& os, const RunSpec& spec,
                 const std::vector<std::string>& columns,
                 const std::vector<TableRow>& rows);

// Convenience overload for purely numeric tables.
void write_table(std::ostream& os, const RunSpec& spec,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

// Reads a two-column CSV (x, value) with uniform spacing into a grid
// function; '#' lines and a header row are skipped.  Throws
// std::runtime_error on ragged spacing (rel. tol 1e-9) or unreadable file.
UniformGridFn load_density_csv(const std::string& path);

}  // namespace fpf
