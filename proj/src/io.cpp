#include "dyadic/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>

#include <json.hpp>

#include "dyadic/errors.hpp"

namespace dyadic {

using nlohmann::json;

std::string histogram_to_json(const DyadicHistogram& hist) {
  if (hist.cell_count() > kDenseCellLimit) throw CapacityError("histogram too large to serialize densely");
  json j;
  j["format_version"] = kHistogramFormatVersion;
  j["d"] = hist.dim();
  j["K"] = hist.depth();
  j["n"] = hist.sample_count();
  std::vector<std::uint64_t> counts(hist.cell_count(), 0);
  hist.counts().for_each_nonzero([&](std::uint64_t k, std::uint64_t c) { counts[k] = c; });
  j["counts"] = std::move(counts);
  if (hist.prior().is_constant())
    j["prior"] = hist.prior().constant_value();
  else
    j["prior"] = hist.prior().values();
  return j.dump();
}

DyadicHistogram histogram_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw DomainError(std::string("histogram JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw DomainError("histogram JSON must be an object");
    if (j.value("format_version", -1) != kHistogramFormatVersion)
      throw DomainError("unsupported histogram format_version");
    const int d = j.at("d").get<int>();
    const int K = j.at("K").get<int>();
    if (d < 1 || K < 0 || static_cast<long long>(K) * d > 24)
      throw DomainError("histogram JSON has invalid d or K");
    const std::uint64_t cells = std::uint64_t{1} << (K * d);
    const auto& jc = j.at("counts");
    if (!jc.is_array() || jc.size() != cells)
      throw DomainError("histogram JSON counts must be an array of 2^(K d) entries");
    CellCounts counts(cells);
    for (std::uint64_t k = 0; k < cells; ++k) {
      if (!jc[k].is_number_unsigned() && !(jc[k].is_number_integer() && jc[k].get<long long>() >= 0))
        throw DomainError("histogram JSON counts must be nonnegative integers");
      counts.add(k, jc[k].get<std::uint64_t>());
    }
    if (j.contains("n") && j.at("n").get<std::uint64_t>() != counts.total())
      throw DomainError("histogram JSON n does not equal the sum of counts");
    const auto& jp = j.at("prior");
    Prior prior = Prior::constant(0.0);
    if (jp.is_number()) {
      prior = Prior::constant(jp.get<double>());
    } else if (jp.is_array()) {
      prior = Prior::per_bin(jp.get<std::vector<double>>());
    } else {
      throw DomainError("histogram JSON prior must be a number or an array");
    }
    return DyadicHistogram(d, K, std::move(counts), std::move(prior));
  } catch (const json::exception& e) {
    throw DomainError(std::string("histogram JSON: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DomainError(std::string("histogram JSON: ") + e.what());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

bool parse_point_row(std::string_view line, int d, std::vector<double>& out) {
  out.clear();
  line = trim(line);
  if (line.empty()) return false;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = trim(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
      throw DomainError("malformed number '" + std::string(field) + "'");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("value " + std::string(field) + " outside [0,1]");
    out.push_back(x);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (d > 0 && static_cast<int>(out.size()) != d)
    throw DomainError("expected " + std::to_string(d) + " columns, found " + std::to_string(out.size()));
  return true;
}

PointSet read_points_csv(std::istream& in, int d) {
  std::string line;
  std::vector<double> row;
  std::uint64_t lineno = 0;
  PointSet points(d > 0 ? d : 1);
  bool have_dim = d > 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      if (!parse_point_row(line, have_dim ? points.dim() : 0, row)) continue;
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_dim) {
      points = PointSet(static_cast<int>(row.size()));
      have_dim = true;
    }
    points.push_back(row);
  }
  return points;
}

std::uint64_t count_csv_rows(std::istream& in) {
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line))
    if (!trim(line).empty()) ++n;
  return n;
}

std::string format_fixed12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", x);
  return buf;
}

std::string format_sig12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace dyadic
