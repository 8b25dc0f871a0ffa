#pragma once

#include <span>
#include <vector>

#include "dyadic/discrete_measure.hpp"
#include "dyadic/histogram.hpp"

namespace dyadic {

/// F^{-1}(z) = intercept + slope * z on [z_lo, z_hi).
struct QuantileSegment {
  double z_lo = 0.0;
  double z_hi = 1.0;
  double intercept = 0.0;
  double slope = 0.0;

  double at(double z) const { return intercept + slope * z; }
};

/// Generalized inverse CDF of a measure on [0,1] as ordered affine pieces
/// covering [0,1]. Jumps between pieces stand for zero-mass gaps.
class PiecewiseQuantile {
 public:
  /// Validates ordering, coverage of [0,1], slope >= 0, and values in [0,1]
  /// that do not decrease across pieces (1e-12 slack).
  explicit PiecewiseQuantile(std::vector<QuantileSegment> segments);

  const std::vector<QuantileSegment>& segments() const { return segments_; }
  double operator()(double z) const;

 private:
  std::vector<QuantileSegment> segments_;
};

/// Quantile of a 1-D histogram with the given cell weights (b = weights.size(),
/// a power of two). Zero-weight cells produce jumps.
PiecewiseQuantile quantile_of_weights(std::span<const double> weights);

/// Quantile of the posterior-mean histogram. Throws ArgumentError unless d = 1.
PiecewiseQuantile quantile_of_histogram(const DyadicHistogram& hist);

/// Step-function quantile of a 1-D discrete measure.
PiecewiseQuantile quantile_of_discrete(const DiscreteMeasure& mu);

}  // namespace dyadic
