#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/histogram.hpp"
#include "dyadic/points.hpp"

namespace dyadic {

inline constexpr int kHistogramFormatVersion = 1;

/// Histogram as a single-line JSON object:
///   {"format_version":1,"d":..,"K":..,"n":..,"counts":[..],"prior":c|[..]}
/// A constant prior is written as a scalar.
std::string histogram_to_json(const DyadicHistogram& hist);

/// Inverse of histogram_to_json. Throws DomainError on malformed input.
DyadicHistogram histogram_from_json(std::string_view text);

/// Parses one CSV row of comma-separated decimals into `out`. Returns false
/// for a blank line. Throws DomainError on malformed numbers, values outside
/// [0,1], or a column count different from `d` (when d > 0).
bool parse_point_row(std::string_view line, int d, std::vector<double>& out);

/// Reads a points CSV. d = 0 infers the dimension from the first row.
/// Errors carry the 1-based line number.
PointSet read_points_csv(std::istream& in, int d = 0);

/// Number of non-blank rows, without validating them.
std::uint64_t count_csv_rows(std::istream& in);

/// Locale-independent formatting: "%.12f" and "%.12g".
std::string format_fixed12(double x);
std::string format_sig12(double x);

}  // namespace dyadic
