#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dyadic/discrete_measure.hpp"
#include "dyadic/histogram.hpp"
#include "dyadic/quantile.hpp"

namespace dyadic {

/// W_v between two measures on [0,1] from their quantile functions:
/// (int_0^1 |F1^{-1} - F2^{-1}|^v dz)^{1/v}. The difference is affine between
/// merged breakpoints; each sign-constant piece is integrated in closed form
/// for integer v and with 16-point Gauss-Legendre otherwise.
double wasserstein_1d(const PiecewiseQuantile& q1, const PiecewiseQuantile& q2, double v);

/// W_v between a piecewise quantile and an arbitrary quantile function,
/// by adaptive Gauss-Kronrod on each piece. `breaks` lists interior levels
/// where `quantile` jumps or has a kink.
double wasserstein_1d(const PiecewiseQuantile& q, const std::function<double(double)>& quantile, double v,
                      std::span<const double> breaks = {});

/// Cell masses of a measure on the nested dyadic partitions of [0,1)^d.
class DyadicMassOracle {
 public:
  virtual ~DyadicMassOracle() = default;
  virtual int dim() const = 0;
  virtual int max_depth() const = 0;
  /// Mass of every depth-k cell, row-major flat order.
  virtual std::vector<double> masses(int k) const = 0;
};

/// Masses of a histogram measure (uniform within each cell) given its weights.
class HistogramMassOracle final : public DyadicMassOracle {
 public:
  HistogramMassOracle(int d, int K, std::vector<double> weights);
  explicit HistogramMassOracle(const DyadicHistogram& hist);

  int dim() const override { return d_; }
  int max_depth() const override;
  std::vector<double> masses(int k) const override;

 private:
  int d_;
  int K_;
  std::vector<double> weights_;
};

/// Masses of a discrete measure: each atom counts in the cell containing it.
class DiscreteMassOracle final : public DyadicMassOracle {
 public:
  explicit DiscreteMassOracle(DiscreteMeasure mu);

  int dim() const override { return mu_.dim(); }
  int max_depth() const override;
  std::vector<double> masses(int k) const override;

 private:
  DiscreteMeasure mu_;
};

/// Resolution d^{1/p} 2^{-k} of the depth-k dyadic partition under the p-norm.
double dyadic_resolution(int d, double p, int k);

/// Multiresolution upper bound on W_v(mu, nu):
///   [ Res(K)^v + sum_{k=1}^{K} Res(k-1)^v sum_S |mu(S) - nu(S)| ]^{1/v}.
/// Throws NumericalError when an oracle's masses do not sum to 1 or do not
/// nest (1e-12).
double multires_bound(const DyadicMassOracle& mu, const DyadicMassOracle& nu, int K, double v, double p);

/// W_v between a histogram and a discrete measure: exact quantile route on the
/// histogram itself for d = 1, discrete optimal transport against the
/// cell-center discretization for d >= 2.
double wv_hist_vs_discrete(const DyadicHistogram& hist, const DiscreteMeasure& nu, double v, double p);

}  // namespace dyadic
