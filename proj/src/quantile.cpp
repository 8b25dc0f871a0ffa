#include "dyadic/quantile.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

PiecewiseQuantile::PiecewiseQuantile(std::vector<QuantileSegment> segments) : segments_(std::move(segments)) {
  constexpr double slack = 1e-12;
  if (segments_.empty()) throw ArgumentError("quantile needs at least one segment");
  if (segments_.front().z_lo != 0.0 || segments_.back().z_hi != 1.0)
    throw ArgumentError("quantile segments must cover [0,1]");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.z_lo < s.z_hi)) throw ArgumentError("quantile segment has empty or reversed range");
    if (!(s.slope >= 0.0) || !std::isfinite(s.intercept)) throw ArgumentError("quantile segment must be nondecreasing");
    const double lo = s.at(s.z_lo), hi = s.at(s.z_hi);
    if (lo < -slack || hi > 1.0 + slack) throw ArgumentError("quantile values must lie in [0,1]");
    if (i + 1 < segments_.size()) {
      const auto& t = segments_[i + 1];
      if (t.z_lo != s.z_hi) throw ArgumentError("quantile segments must be contiguous");
      if (t.at(t.z_lo) < hi - slack) throw ArgumentError("quantile must be nondecreasing across segments");
    }
  }
}

double PiecewiseQuantile::operator()(double z) const {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("quantile level outside [0,1]");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), z,
                             [](double zz, const QuantileSegment& s) { return zz < s.z_hi; });
  if (it == segments_.end()) --it;
  return std::clamp(it->at(z), 0.0, 1.0);
}

PiecewiseQuantile quantile_of_weights(std::span<const double> weights) {
  const std::size_t b = weights.size();
  if (b == 0 || !std::has_single_bit(b)) throw ArgumentError("histogram weights must have 2^K entries");
  std::vector<double> cum(b + 1, 0.0);
  for (std::size_t j = 0; j < b; ++j) {
    if (!(weights[j] >= 0.0)) throw ArgumentError("histogram weights must be >= 0");
    cum[j + 1] = cum[j] + weights[j];
  }
  const double total = cum[b];
  if (!(total > 0.0)) throw NumericalError("histogram weights have zero total mass");

  std::vector<QuantileSegment> segs;
  const double width = 1.0 / static_cast<double>(b);
  for (std::size_t j = 0; j < b; ++j) {
    if (weights[j] <= 0.0) continue;
    const double z_lo = segs.empty() ? 0.0 : segs.back().z_hi;
    double z_hi = cum[j + 1] / total;
    if (z_hi <= z_lo) continue;  // weight below rounding of the cumulative sum
    const double x_lo = static_cast<double>(j) * width;
    const double slope = width / (z_hi - z_lo);
    segs.push_back({z_lo, z_hi, x_lo - slope * z_lo, slope});
  }
  segs.back().z_hi = 1.0;  // cum[b] / total is exactly 1 already
  return PiecewiseQuantile(std::move(segs));
}

PiecewiseQuantile quantile_of_histogram(const DyadicHistogram& hist) {
  if (hist.dim() != 1) throw ArgumentError("quantile_of_histogram needs a 1-D histogram");
  const auto w = posterior_mean_weights(hist);
  return quantile_of_weights(w);
}

PiecewiseQuantile quantile_of_discrete(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw ArgumentError("quantile_of_discrete needs a 1-D measure");
  std::vector<std::size_t> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mu.atom(a)[0] < mu.atom(b)[0]; });

  // Summing in sorted order makes the final cumulative sum equal `total`.
  double total = 0.0;
  for (std::size_t k : order) total += mu.weight(k);

  std::vector<QuantileSegment> segs;
  double running = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double x = mu.atom(order[k])[0];
    const double w = mu.weight(order[k]);
    running += w;
    const double cum = running / total;
    if (w <= 0.0) continue;
    if (!segs.empty() && segs.back().intercept == x) {
      segs.back().z_hi = cum;
      continue;
    }
    const double z_lo = segs.empty() ? 0.0 : segs.back().z_hi;
    if (cum <= z_lo) continue;
    segs.push_back({z_lo, cum, x, 0.0});
  }
  if (segs.empty()) throw NumericalError("discrete measure has no positive-weight atom");
  segs.back().z_hi = 1.0;
  // Pieces after the one reaching 1 in floating point would be empty.
  while (segs.size() > 1 && segs[segs.size() - 2].z_hi >= 1.0) {
    segs[segs.size() - 2].z_hi = 1.0;
    segs.pop_back();
  }
  return PiecewiseQuantile(std::move(segs));
}

}  // namespace dyadic
