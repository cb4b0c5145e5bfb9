#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "grr/poly_io.hpp"

namespace grr {

/// One named column of plot data.
struct Series {
    std::string name;
    std::vector<double> values;
};

/// CSV with one column per series: header row of names, then one row
/// per index.  Numbers use the shortest round-trip decimal form, so
/// the output is a deterministic function of the inputs.
inline std::string emit_plot_data(const std::vector<Series>& series) {
    if (series.empty()) throw std::invalid_argument("no series to emit");
    const std::size_t rows = series[0].values.size();
    for (const auto& s : series) {
        if (s.name.find(',') != std::string::npos || s.name.find('\n') != std::string::npos)
            throw std::invalid_argument("series name contains a delimiter");
        if (s.values.size() != rows) throw std::invalid_argument("ragged series");
    }
    std::string out;
    for (std::size_t j = 0; j < series.size(); ++j) {
        if (j) out += ',';
        out += series[j].name;
    }
    out += '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < series.size(); ++j) {
            if (j) out += ',';
            out += detail::double_repr(series[j].values[i]);
        }
        out += '\n';
    }
    return out;
}

/// Non-increasing running minimum, the standard companion column for
/// residual-vs-restart plots.
inline std::vector<double> running_min(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    double best = std::numeric_limits<double>::infinity();
    for (double x : v) {
        best = std::min(best, x);
        out.push_back(best);
    }
    return out;
}

}  // namespace grr
