#pragma once

#include <span>
#include <vector>

#include "dyadic/points.hpp"

namespace dyadic {

/// Finitely many weighted atoms in [0,1)^d. Used for the empirical measure
/// and for histograms collapsed onto their cell centers.
class DiscreteMeasure {
 public:
  /// Validates: nonempty, matching sizes, coordinates in [0,1] (1.0 is
  /// accepted as the closed right endpoint), weights >= 0 summing to 1
  /// within 1e-12.
  DiscreteMeasure(PointSet atoms, std::vector<double> weights);

  /// Equal weights 1/n on the given points.
  static DiscreteMeasure empirical(const PointSet& points);

  int dim() const { return atoms_.dim(); }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const PointSet& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  PointSet atoms_;
  std::vector<double> weights_;
};

/// Neumaier-compensated sum.
double stable_sum(std::span<const double> xs);

}  // namespace dyadic
