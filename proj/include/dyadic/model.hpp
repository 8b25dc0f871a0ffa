#pragma once

#include <cstdint>
#include <variant>
#include <vector>

namespace dyadic {

/// Depth chosen from the sample size: k_n = n^(1/2v) when d <= 2v, else n^(1/d).
struct AutoDepth {};
struct ExplicitDepth {
  int K = 0;
};
using DepthRule = std::variant<AutoDepth, ExplicitDepth>;

struct ZeroPrior {};
struct ConstantPrior {
  double c = 1.0;
};
/// Uniform concentration c(n) from default_prior_concentration().
struct AutoConstantPrior {};
struct PerBinPrior {
  std::vector<double> alpha;
};
using PriorSpec = std::variant<ZeroPrior, ConstantPrior, AutoConstantPrior, PerBinPrior>;

struct ModelConfig {
  int d = 1;
  double v = 1.0;  // Wasserstein order
  double p = 1.0;  // ground-metric norm order
  DepthRule depth = AutoDepth{};
  PriorSpec prior = ZeroPrior{};

  /// Throws ArgumentError unless d >= 1, v >= 1, p >= 1 and priors are nonnegative.
  void validate() const;
};

struct DepthChoice {
  double k_n = 1.0;  // unrounded resolution n^(1/2v) or n^(1/d)
  int K = 0;         // ceil(log2 k_n)
  std::uint64_t b = 1;  // bins per axis, 2^K
};

/// Depth rule for n samples. K is computed in integer arithmetic whenever the
/// exponent denominator (2v or d) is an integer, so exact powers of two never
/// round to the wrong side.
DepthChoice auto_depth(std::uint64_t n, int d, double v);

/// Per-bin concentration c(n): 1 if d <= v, n^(1/2 - d/2v) if v < d <= 2v,
/// n^(-v/d) if d > 2v. n = 0 is treated as n = 1.
double default_prior_concentration(std::uint64_t n, int d, double v);

/// Order of the admissible total prior mass: n^(1/2) for d <= 2v, n^(1 - v/d)
/// otherwise. Multiplied by 2^d (the worst-case ratio b_n^d / k_n^d) when
/// deciding whether a prior deserves a warning.
double prior_budget(std::uint64_t n, int d, double v);
bool prior_exceeds_budget(double total_prior, std::uint64_t n, int d, double v);

/// ceil(log2(n)) for n >= 1.
int ceil_log2(std::uint64_t n);

}  // namespace dyadic
