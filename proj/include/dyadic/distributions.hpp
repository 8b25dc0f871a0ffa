#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/discrete_measure.hpp"
#include "dyadic/points.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

/// Ground-truth laws for the simulations: Uniform on [0,1]^d, symmetric
/// Beta(x, x), Split(a, e) on [0,e) u [1-e,1), and products of 1-D laws.
class GroundTruth {
 public:
  enum class Kind { Uniform, BetaSym, Split, Product };

  static GroundTruth uniform(int d);
  static GroundTruth beta_sym(double x);
  /// Requires 0 < e < 0.5 and 0 < a < 1/e^2.
  static GroundTruth split(double a, double e);
  /// Components must be 1-D.
  static GroundTruth product(std::vector<GroundTruth> components);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double beta_x() const { return p0_; }
  double split_a() const { return p0_; }
  double split_e() const { return p1_; }
  /// Intercept b = (1 - a e^2) / (2e).
  double split_b() const;
  const std::vector<GroundTruth>& components() const { return components_; }

  /// Canonical text form, accepted by parse_ground_truth.
  std::string name() const;

 private:
  GroundTruth(Kind kind, int dim, double p0, double p1) : kind_(kind), dim_(dim), p0_(p0), p1_(p1) {}
  Kind kind_;
  int dim_;
  double p0_;
  double p1_;
  std::vector<GroundTruth> components_;
};

/// `uniform:d`, `beta:x`, `split:a,e`, `product:s1|s2|...`.
/// Throws ConfigError on malformed text or invalid parameters.
GroundTruth parse_ground_truth(std::string_view text);

/// p_{a,e}(x) = (ax + b) on [0,e), (ax + b - (1-e)a) on [1-e,1), 0 elsewhere.
double split_density(double a, double e, double x);

/// Density at a point of [0,1]^d (0 outside).
double density(const GroundTruth& gt, std::span<const double> x);

/// CDF and generalized inverse of a 1-D ground truth. Out-of-range arguments
/// raise DomainError; multi-dimensional truths raise ArgumentError.
double cdf(const GroundTruth& gt, double x);
double quantile(const GroundTruth& gt, double z);

/// Levels z in (0,1) where the quantile function is not smooth.
std::vector<double> quantile_breakpoints(const GroundTruth& gt);

/// n i.i.d. draws by inverse CDF; product components are drawn independently
/// in coordinate order.
PointSet sample(const GroundTruth& gt, Rng& rng, std::size_t n);

/// Empirical measure of m i.i.d. draws.
DiscreteMeasure discretize_ground_truth(const GroundTruth& gt, std::size_t m, Rng& rng);

}  // namespace dyadic
