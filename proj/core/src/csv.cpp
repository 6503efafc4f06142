#include "dirireg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dirireg/errors.hpp"

namespace dirireg {

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return j;
    }
    throw Error("column '" + name + "' not found in input");
}

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

namespace {

// Splits one physical line; multi-line quoted fields are not supported,
// which is fine for the numeric tables this tool reads and writes.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    if (in_quotes) {
        throw Error("malformed CSV (unterminated quote) at line " + std::to_string(lineno));
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            table.header = split_csv_line(line, lineno);
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line, lineno);
        if (fields.size() != table.header.size()) {
            throw Error("malformed CSV row at line " + std::to_string(lineno) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw Error("empty CSV input: missing header row");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open input file '" + path + "'");
    return read_csv(f);
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open output file '" + path + "'");
    std::ostringstream os;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j) os << ',';
        os << csv_escape(table.header[j]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) os << ',';
            os << csv_escape(row[j]);
        }
        os << '\n';
    }
    f << os.str();
    if (!f) throw Error("failed writing '" + path + "'");
}

}  // namespace dirireg
