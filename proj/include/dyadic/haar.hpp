#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dyadic/points.hpp"

namespace dyadic {

/// Which Haar factor acts on an axis: the father (indicator of [0,1)) or
/// the mother (+1 on [0,1/2), -1 on [1/2,1)).
enum class HaarFactor { Father, Mother };

double haar_father(double x);
double haar_mother(double x);

/// Tensor-product wavelet 2^(d u / 2) * prod_l psi_{G_l}(2^u x_l - m_l).
double haar_wavelet(int u, std::span<const HaarFactor> kind, std::span<const std::uint64_t> shift,
                    std::span<const double> x);

/// Truncated 2-D Haar expansion 1 + sum_{u<J} sum_{Gamma in Psi_u} beta_Gamma Gamma
/// with empirical coefficients beta_Gamma = mean_i Gamma(Y_i), evaluated on
/// every depth-J cell. Returns 2^J x 2^J values in row-major order (first
/// coordinate most significant), matching the histogram flat index.
std::vector<double> haar_estimate_2d(const PointSet& points, int J);

}  // namespace dyadic
