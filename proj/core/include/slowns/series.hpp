#pragma once

#include <string>
#include <vector>

namespace slowns {

// Named scalar time series sharing one time axis.
struct DiagnosticSeries {
    std::vector<std::string> names;
    std::vector<double> t;
    std::vector<std::vector<double>> columns;

    DiagnosticSeries() = default;
    explicit DiagnosticSeries(std::vector<std::string> column_names);

    std::size_t rows() const { return t.size(); }
    void add_row(double time, const std::vector<double>& values);
    bool has(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    // Concatenate columns of another series sampled at the same times.
    void append_columns(const DiagnosticSeries& other);

    void write_csv(const std::string& path) const;
    static DiagnosticSeries read_csv(const std::string& path);
};

// Round-trip exact scientific notation.
std::string format_double(double v);

}  // namespace slowns
