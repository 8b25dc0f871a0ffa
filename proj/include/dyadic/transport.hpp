#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dyadic/discrete_measure.hpp"

namespace dyadic {

inline constexpr std::size_t kMaxTransportAtoms = 5000;

struct TransportFlow {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct TransportResult {
  double cost = 0.0;                 // sum of mass * cost over the plan
  std::vector<TransportFlow> plan;   // basic cells with positive mass
  std::size_t pivots = 0;
};

/// Transportation simplex for min sum c_ij x_ij subject to row sums `supply`
/// and column sums `demand`. `cost` is row-major supply.size() x demand.size().
/// North-west-corner start; block pricing, falling back to Bland's rule after
/// a run of degenerate pivots. Ties go to the lowest cell index.
TransportResult solve_transport(std::span<const double> supply, std::span<const double> demand,
                                std::span<const double> cost);

/// Ground cost ||x - y||_p^v.
double ground_cost(std::span<const double> x, std::span<const double> y, double v, double p);

/// Exact W_v between two discrete measures under the p-norm ground metric.
/// Throws CapacityError when either side has more than kMaxTransportAtoms atoms.
double ot_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double v, double p);

}  // namespace dyadic
