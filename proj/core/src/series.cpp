#include "slowns/series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "slowns/errors.hpp"

namespace slowns {

DiagnosticSeries::DiagnosticSeries(std::vector<std::string> column_names)
    : names(std::move(column_names)), columns(names.size()) {}

void DiagnosticSeries::add_row(double time, const std::vector<double>& values) {
    if (values.size() != names.size()) throw MismatchError("DiagnosticSeries: row width mismatch");
    t.push_back(time);
    for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
}

bool DiagnosticSeries::has(const std::string& name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

const std::vector<double>& DiagnosticSeries::column(const std::string& name) const {
    for (std::size_t c = 0; c < names.size(); ++c)
        if (names[c] == name) return columns[c];
    throw Error("DiagnosticSeries: no column '" + name + "'");
}

void DiagnosticSeries::append_columns(const DiagnosticSeries& other) {
    if (other.t.size() != t.size()) throw MismatchError("append_columns: row count mismatch");
    for (std::size_t r = 0; r < t.size(); ++r)
        if (other.t[r] != t[r]) throw MismatchError("append_columns: time axes differ");
    for (std::size_t c = 0; c < other.names.size(); ++c) {
        names.push_back(other.names[c]);
        columns.push_back(other.columns[c]);
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

void DiagnosticSeries::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Error("write_csv: cannot open " + path);
    os << "t";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t r = 0; r < t.size(); ++r) {
        os << format_double(t[r]);
        for (const auto& col : columns) os << ',' << format_double(col[r]);
        os << '\n';
    }
    if (!os) throw Error("write_csv: write failed for " + path);
}

DiagnosticSeries DiagnosticSeries::read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("read_csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw Error("read_csv: empty file " + path);
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) head.push_back(cell);
    }
    if (head.empty() || head[0] != "t") throw Error("read_csv: first column must be 't'");
    DiagnosticSeries s(std::vector<std::string>(head.begin() + 1, head.end()));
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw Error("read_csv: bad number on line " + std::to_string(lineno));
            row.push_back(v);
        }
        if (row.size() != head.size()) throw Error("read_csv: ragged row on line " + std::to_string(lineno));
        s.add_row(row[0], std::vector<double>(row.begin() + 1, row.end()));
    }
    return s;
}

}  // namespace slowns
