#include "dyadic/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dyadic/discrete_measure.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

void check_alpha(std::span<const double> alpha) {
  if (alpha.empty()) throw ArgumentError("alpha must be nonempty");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("Dirichlet parameters must be positive and finite");
}

}  // namespace

double dirichlet_threshold(std::span<const double> alpha, double delta) {
  check_alpha(alpha);
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  const double total = stable_sum(alpha);
  return std::sqrt(static_cast<double>(alpha.size()) / total) / delta;
}

double dirichlet_concentration_mc(std::span<const double> alpha, double delta, std::size_t reps, Rng& rng) {
  const double threshold = dirichlet_threshold(alpha, delta);
  if (reps < 1) throw ArgumentError("reps must be >= 1");
  const std::size_t k = alpha.size();
  const double total = stable_sum(alpha);
  std::vector<double> logs(k);
  std::size_t exceed = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    double lmax = -INFINITY;
    for (std::size_t j = 0; j < k; ++j) {
      logs[j] = rng.log_gamma_variate(alpha[j]);
      lmax = std::max(lmax, logs[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(logs[j] - lmax);
    double stat = 0.0;
    for (std::size_t j = 0; j < k; ++j) stat += std::abs(std::exp(logs[j] - lmax) / z - alpha[j] / total);
    if (k == 1) stat = 0.0;
    if (stat >= threshold) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(reps);
}

McEstimate multinomial_concentration_mc(std::uint64_t n, std::span<const double> probs, std::size_t reps, Rng& rng) {
  if (n < 1) throw ArgumentError("multinomial n must be >= 1");
  if (reps < 2) throw ArgumentError("reps must be >= 2");
  if (probs.empty()) throw ArgumentError("probabilities must be nonempty");
  for (double q : probs)
    if (!(q >= 0.0) || !std::isfinite(q)) throw ArgumentError("probabilities must be >= 0");
  if (std::abs(stable_sum(probs) - 1.0) > 1e-12) throw ArgumentError("probabilities must sum to 1");

  const std::size_t k = probs.size();
  std::vector<double> cum(k);
  double run = 0.0;
  for (std::size_t j = 0; j < k; ++j) cum[j] = (run += probs[j]);
  cum[k - 1] = 1.0;
  // Last cell with positive probability, so rounding never lands on a zero cell.
  std::size_t last = k - 1;
  while (last > 0 && probs[last] == 0.0) --last;

  std::vector<std::uint64_t> counts(k);
  double sum = 0.0, sum_sq = 0.0;
  const double nd = static_cast<double>(n);
  for (std::size_t r = 0; r < reps; ++r) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      auto j = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      ++counts[std::min(j, last)];
    }
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::abs(static_cast<double>(counts[j]) - nd * probs[j]);
    z /= nd;
    sum += z;
    sum_sq += z * z;
  }
  const double rd = static_cast<double>(reps);
  const double mean = sum / rd;
  const double var = std::max(0.0, (sum_sq - rd * mean * mean) / (rd - 1.0));
  return {mean, std::sqrt(var / rd)};
}

double multinomial_bound(std::uint64_t n, std::size_t k) {
  if (n < 1 || k < 1) throw ArgumentError("multinomial bound needs n >= 1 and k >= 1");
  return std::sqrt(static_cast<double>(k - 1) / static_cast<double>(n));
}

}  // namespace dyadic
