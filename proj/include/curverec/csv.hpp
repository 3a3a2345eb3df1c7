#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curverec/market.hpp"
#include "curverec/matrix.hpp"

namespace curverec::csv {

// All numeric output uses 12 significant digits; parse-emit round-trips are
// lossless at that precision.
std::string format_double(double v);

double parse_double(const std::string& cell, const std::string& context);

// Raw cells, one vector per line, empty lines skipped.
std::vector<std::vector<std::string>> read_rows(std::istream& in);

// Canonical level labels for the y layout: a{n}..a{2}, b{1}..b{n}.
std::vector<std::string> level_labels(std::size_t n);

// `level,value` file: levels ordered as y, a_n first.
struct ForecastFile {
    std::vector<std::string> labels;
    std::vector<double> values;
};
ForecastFile read_forecast(std::istream& in);
void write_forecast(std::ostream& out, const std::vector<std::string>& labels,
                    const std::vector<double>& values);

// Panel file: a header of level labels, one row per time step.
struct PanelFile {
    std::vector<std::string> labels;
    Matrix values;
};
PanelFile read_panel(std::istream& in);
void write_matrix(std::ostream& out, const std::vector<std::string>& labels, const Matrix& m);

// `index,value` file for curves and bottom series.
std::vector<double> read_series(std::istream& in);
void write_series(std::ostream& out, const std::vector<double>& values);

// `side,price,volume` bid file holding one auction hour, both sides.
struct BidsFile {
    std::vector<Bid> supply;
    std::vector<Bid> demand;
};
BidsFile read_bids(std::istream& in);

}  // namespace curverec::csv
