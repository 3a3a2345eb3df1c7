#include "curverec/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "curverec/errors.hpp"

namespace curverec::csv {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

void expect_header(const std::vector<std::string>& cells, std::initializer_list<const char*> want,
                   const char* what) {
    if (cells.size() != want.size())
        throw ParseError(std::string(what) + ": bad header column count");
    std::size_t i = 0;
    for (const char* w : want)
        if (cells[i++] != w) throw ParseError(std::string(what) + ": expected header '" + w + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double parse_double(const std::string& cell, const std::string& context) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(context + ": cannot parse number '" + cell + "'");
    return value;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_line(line));
    }
    return rows;
}

std::vector<std::string> level_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(2 * n - 1);
    for (std::size_t i = n; i >= 2; --i) labels.push_back("a" + std::to_string(i));
    for (std::size_t j = 1; j <= n; ++j) labels.push_back("b" + std::to_string(j));
    return labels;
}

ForecastFile read_forecast(std::istream& in) {
    const auto rows = read_rows(in);
    if (rows.empty()) throw ParseError("forecast: empty file");
    expect_header(rows[0], {"level", "value"}, "forecast");
    ForecastFile f;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw ParseError("forecast: row needs 2 columns");
        f.labels.push_back(rows[r][0]);
        f.values.push_back(parse_double(rows[r][1], "forecast"));
    }
    if (f.values.size() < 3 || f.values.size() % 2 == 0)
        throw ParseError("forecast: need an odd number of levels, at least 3");
    return f;
}

void write_forecast(std::ostream& out, const std::vector<std::string>& labels,
                    const std::vector<double>& values) {
    out << "level,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << labels[i] << ',' << format_double(values[i]) << '\n';
}

PanelFile read_panel(std::istream& in) {
    const auto rows = read_rows(in);
    if (rows.size() < 2) throw ParseError("panel: need a header and at least one row");
    PanelFile p;
    p.labels = rows[0];
    const std::size_t cols = p.labels.size();
    if (cols < 3 || cols % 2 == 0)
        throw ParseError("panel: need an odd number of level columns, at least 3");
    p.values = Matrix(rows.size() - 1, cols);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ParseError("panel: ragged row");
        for (std::size_t c = 0; c < cols; ++c)
            p.values(r - 1, c) = parse_double(rows[r][c], "panel");
    }
    return p;
}

void write_matrix(std::ostream& out, const std::vector<std::string>& labels, const Matrix& m) {
    for (std::size_t c = 0; c < labels.size(); ++c) out << (c ? "," : "") << labels[c];
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_double(m(r, c));
        out << '\n';
    }
}

std::vector<double> read_series(std::istream& in) {
    const auto rows = read_rows(in);
    if (rows.empty()) throw ParseError("series: empty file");
    expect_header(rows[0], {"index", "value"}, "series");
    std::vector<double> values;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw ParseError("series: row needs 2 columns");
        const double idx = parse_double(rows[r][0], "series");
        if (idx != static_cast<double>(r))
            throw ParseError("series: indices must run 1..n in order");
        values.push_back(parse_double(rows[r][1], "series"));
    }
    return values;
}

void write_series(std::ostream& out, const std::vector<double>& values) {
    out << "index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << (i + 1) << ',' << format_double(values[i]) << '\n';
}

BidsFile read_bids(std::istream& in) {
    const auto rows = read_rows(in);
    if (rows.empty()) throw ParseError("bids: empty file");
    expect_header(rows[0], {"side", "price", "volume"}, "bids");
    BidsFile bids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) throw ParseError("bids: row needs 3 columns");
        const Bid bid{parse_double(rows[r][1], "bids"), parse_double(rows[r][2], "bids")};
        if (rows[r][0] == "supply")
            bids.supply.push_back(bid);
        else if (rows[r][0] == "demand")
            bids.demand.push_back(bid);
        else
            throw ParseError("bids: side must be 'supply' or 'demand'");
    }
    return bids;
}

}  // namespace curverec::csv
