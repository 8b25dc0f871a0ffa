#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dyadic/discrete_measure.hpp"
#include "dyadic/model.hpp"
#include "dyadic/points.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

/// Largest cell count stored densely; finer grids use an ordered sparse map.
inline constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 24;

/// Location of a point in the depth-K dyadic grid. `index` holds the 0-based
/// per-axis cell index; the cell along axis l is [index[l]/b, (index[l]+1)/b).
struct CellIndex {
  std::vector<std::uint64_t> index;
  std::uint64_t flat = 0;  // row-major, first axis most significant
};

/// Cell containing `point` at depth K, found by K successive midpoint
/// comparisons per axis. A coordinate of exactly 1.0 lands in the last cell.
/// Throws DomainError for coordinates outside [0,1] or NaN.
CellIndex bin_index(std::span<const double> point, int K);
std::uint64_t bin_flat(std::span<const double> point, int K);

/// Row-major flat index <-> per-axis index.
std::uint64_t flatten(std::span<const std::uint64_t> index, int K);
std::vector<std::uint64_t> unflatten(std::uint64_t flat, int d, int K);

/// Per-cell occupancy counts, dense up to kDenseCellLimit cells.
class CellCounts {
 public:
  explicit CellCounts(std::uint64_t cells = 1);

  void add(std::uint64_t flat, std::uint64_t k = 1);
  std::uint64_t at(std::uint64_t flat) const;
  std::uint64_t cells() const { return cells_; }
  bool is_dense() const { return !sparse_; }
  /// Number of allocated counters.
  std::uint64_t stored() const { return sparse_ ? map_.size() : dense_.size(); }
  std::uint64_t total() const { return total_; }

  /// Visits (flat, count) for every nonzero cell in ascending flat order.
  template <class F>
  void for_each_nonzero(F&& f) const {
    if (sparse_) {
      for (const auto& [k, c] : map_) f(k, c);
    } else {
      for (std::uint64_t k = 0; k < dense_.size(); ++k)
        if (dense_[k] != 0) f(k, dense_[k]);
    }
  }

  bool operator==(const CellCounts& o) const;

 private:
  std::uint64_t cells_;
  bool sparse_;
  std::vector<std::uint64_t> dense_;
  std::map<std::uint64_t, std::uint64_t> map_;
  std::uint64_t total_ = 0;
};

/// Dirichlet prior concentrations, either one constant shared by every cell
/// or an explicit per-cell array.
class Prior {
 public:
  static Prior constant(double c) { return Prior(c); }
  static Prior per_bin(std::vector<double> alpha);

  bool is_constant() const { return !per_bin_.has_value(); }
  double constant_value() const { return constant_; }
  const std::vector<double>& values() const { return *per_bin_; }
  double at(std::uint64_t flat) const { return per_bin_ ? (*per_bin_)[flat] : constant_; }
  double total(std::uint64_t cells) const;

  bool operator==(const Prior&) const = default;

 private:
  explicit Prior(double c) : constant_(c) {}
  double constant_ = 0.0;
  std::optional<std::vector<double>> per_bin_;
};

/// Dyadic histogram of depth K on [0,1)^d with bin counts and prior
/// concentrations. Immutable once built.
class DyadicHistogram {
 public:
  DyadicHistogram(int d, int K, CellCounts counts, Prior prior);

  int dim() const { return d_; }
  int depth() const { return K_; }
  std::uint64_t bins_per_axis() const { return std::uint64_t{1} << K_; }
  std::uint64_t cell_count() const { return counts_.cells(); }
  std::uint64_t sample_count() const { return counts_.total(); }

  const CellCounts& counts() const { return counts_; }
  const Prior& prior() const { return prior_; }
  double total_prior() const { return total_prior_; }

  /// alpha*_j = prior_j + count_j
  double posterior_concentration(std::uint64_t flat) const {
    return prior_.at(flat) + static_cast<double>(counts_.at(flat));
  }
  /// n + sum(prior)
  double posterior_total() const { return static_cast<double>(counts_.total()) + total_prior_; }

  /// Posterior-mean weight of one cell. Throws NumericalError for a
  /// histogram with no samples and zero prior.
  double weight(std::uint64_t flat) const;

  bool operator==(const DyadicHistogram&) const;

 private:
  int d_;
  int K_;
  CellCounts counts_;
  Prior prior_;
  double total_prior_;
};

/// Resolves a prior spec for a histogram of `cells` cells built from n samples.
Prior resolve_prior(const PriorSpec& spec, std::uint64_t n, int d, double v, std::uint64_t cells);

/// Depth used by fit_batch for n samples under `config` (K = 0 when n = 0 and
/// depth is automatic).
int resolve_depth(const ModelConfig& config, std::uint64_t n);

/// Counts every point into the depth-K grid and attaches the resolved prior.
/// Invalid points raise DomainError naming the offending index.
DyadicHistogram fit_batch(const PointSet& points, const ModelConfig& config);

/// Posterior-mean weights (prior_j + count_j) / (n + sum prior), dense.
std::vector<double> posterior_mean_weights(const DyadicHistogram& hist);

/// Density of the posterior-mean histogram at a point: b^d * weight of the
/// containing cell.
double density_at(const DyadicHistogram& hist, std::span<const double> point);

/// Collapses each positive-weight cell onto its center.
DiscreteMeasure discretize(const DyadicHistogram& hist);

/// One draw of cell weights from Dirichlet(alpha*), via normalized Gamma
/// variates. Every alpha*_j must be positive.
std::vector<double> sample_posterior(const DyadicHistogram& hist, Rng& rng);

/// Aggregates to a coarser depth; counts and prior are summed over the
/// 2^((K - target) d) descendants of each coarse cell.
DyadicHistogram coarsen(const DyadicHistogram& hist, int target_K);

}  // namespace dyadic
