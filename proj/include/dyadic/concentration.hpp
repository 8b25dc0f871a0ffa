#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "dyadic/rng.hpp"

namespace dyadic {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(reps)
};

/// Threshold alpha_bar^{-1/2} sqrt(k) / delta, alpha_bar = sum(alpha).
double dirichlet_threshold(std::span<const double> alpha, double delta);

/// Fraction of Dirichlet(alpha) draws with sum_j |pi_j - E pi_j| at or above
/// dirichlet_threshold(alpha, delta).
double dirichlet_concentration_mc(std::span<const double> alpha, double delta, std::size_t reps, Rng& rng);

/// Monte-Carlo mean of sum_j |X_j - n p_j| / n for X ~ Multinomial(n, probs).
McEstimate multinomial_concentration_mc(std::uint64_t n, std::span<const double> probs, std::size_t reps, Rng& rng);

/// sqrt((k - 1) / n).
double multinomial_bound(std::uint64_t n, std::size_t k);

}  // namespace dyadic
