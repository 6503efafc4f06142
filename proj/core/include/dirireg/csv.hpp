#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dirireg {

/// In-memory CSV table: header row plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return header.size(); }

    /// Column index by name; throws Error naming the column when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Parses CSV with a header row. Handles quoted fields ("" escapes a
/// quote). Raises Error with the 1-based line number on ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Formats a cell, quoting when it contains commas, quotes or newlines.
std::string csv_escape(const std::string& cell);

/// Shortest round-trip decimal formatting for doubles; NaN prints as "NA".
std::string format_double(double v);

void write_csv_file(const std::string& path, const CsvTable& table);

}  // namespace dirireg
