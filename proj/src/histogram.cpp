#include "dyadic/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

void check_grid(int d, int K) {
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  if (K < 0) throw ArgumentError("depth must be >= 0");
  if (static_cast<long long>(K) * d > 62) throw CapacityError("grid of 2^(K d) cells exceeds 2^62");
}

std::uint64_t axis_index(double x, int K) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("coordinate " + std::to_string(x) + " outside [0,1]");
  const std::uint64_t b = std::uint64_t{1} << K;
  if (x == 1.0) return b - 1;
  double lo = 0.0, hi = 1.0;
  std::uint64_t idx = 0;
  for (int level = 0; level < K; ++level) {
    const double mid = 0.5 * (lo + hi);
    if (x >= mid) {
      idx = 2 * idx + 1;
      lo = mid;
    } else {
      idx = 2 * idx;
      hi = mid;
    }
  }
  return idx;
}

}  // namespace

CellIndex bin_index(std::span<const double> point, int K) {
  check_grid(static_cast<int>(point.size()), K);
  CellIndex out;
  out.index.reserve(point.size());
  for (double x : point) {
    const std::uint64_t i = axis_index(x, K);
    out.index.push_back(i);
    out.flat = (out.flat << K) | i;
  }
  return out;
}

std::uint64_t bin_flat(std::span<const double> point, int K) {
  std::uint64_t flat = 0;
  for (double x : point) flat = (flat << K) | axis_index(x, K);
  return flat;
}

std::uint64_t flatten(std::span<const std::uint64_t> index, int K) {
  const std::uint64_t b = std::uint64_t{1} << K;
  std::uint64_t flat = 0;
  for (std::uint64_t i : index) {
    if (i >= b) throw ArgumentError("cell index out of range");
    flat = (flat << K) | i;
  }
  return flat;
}

std::vector<std::uint64_t> unflatten(std::uint64_t flat, int d, int K) {
  std::vector<std::uint64_t> index(static_cast<std::size_t>(d));
  const std::uint64_t mask = (std::uint64_t{1} << K) - 1;
  for (int l = d - 1; l >= 0; --l) {
    index[static_cast<std::size_t>(l)] = flat & mask;
    flat >>= K;
  }
  return index;
}

// ---------------------------------------------------------------------------
// CellCounts

CellCounts::CellCounts(std::uint64_t cells) : cells_(cells), sparse_(cells > kDenseCellLimit) {
  if (cells == 0) throw ArgumentError("a grid has at least one cell");
  if (!sparse_) dense_.assign(cells, 0);
}

void CellCounts::add(std::uint64_t flat, std::uint64_t k) {
  if (flat >= cells_) throw ArgumentError("flat cell index out of range");
  if (k == 0) return;
  if (sparse_)
    map_[flat] += k;
  else
    dense_[flat] += k;
  total_ += k;
}

std::uint64_t CellCounts::at(std::uint64_t flat) const {
  if (sparse_) {
    auto it = map_.find(flat);
    return it == map_.end() ? 0 : it->second;
  }
  return dense_[flat];
}

bool CellCounts::operator==(const CellCounts& o) const {
  if (cells_ != o.cells_ || total_ != o.total_) return false;
  if (sparse_ == o.sparse_) return sparse_ ? map_ == o.map_ : dense_ == o.dense_;
  bool same = true;
  for_each_nonzero([&](std::uint64_t k, std::uint64_t c) { same = same && o.at(k) == c; });
  return same;
}

// ---------------------------------------------------------------------------
// Prior

Prior Prior::per_bin(std::vector<double> alpha) {
  for (double a : alpha)
    if (!(a >= 0.0) || !std::isfinite(a)) throw ArgumentError("prior concentrations must be finite and >= 0");
  Prior p(0.0);
  p.per_bin_ = std::move(alpha);
  return p;
}

double Prior::total(std::uint64_t cells) const {
  if (per_bin_) return stable_sum(*per_bin_);
  return constant_ * static_cast<double>(cells);
}

// ---------------------------------------------------------------------------
// DyadicHistogram

DyadicHistogram::DyadicHistogram(int d, int K, CellCounts counts, Prior prior)
    : d_(d), K_(K), counts_(std::move(counts)), prior_(std::move(prior)) {
  check_grid(d, K);
  const std::uint64_t cells = std::uint64_t{1} << (K * d);
  if (counts_.cells() != cells) throw ArgumentError("count array does not match 2^(K d) cells");
  if (!prior_.is_constant() && prior_.values().size() != cells)
    throw ArgumentError("per-bin prior has " + std::to_string(prior_.values().size()) + " entries, expected " +
                        std::to_string(cells));
  if (prior_.is_constant() && !(prior_.constant_value() >= 0.0 && std::isfinite(prior_.constant_value())))
    throw ArgumentError("prior concentration must be finite and >= 0");
  total_prior_ = prior_.total(cells);
}

double DyadicHistogram::weight(std::uint64_t flat) const {
  const double total = posterior_total();
  if (!(total > 0.0)) throw NumericalError("degenerate histogram: no samples and zero prior mass");
  return posterior_concentration(flat) / total;
}

bool DyadicHistogram::operator==(const DyadicHistogram& o) const {
  return d_ == o.d_ && K_ == o.K_ && counts_ == o.counts_ && prior_ == o.prior_;
}

// ---------------------------------------------------------------------------

Prior resolve_prior(const PriorSpec& spec, std::uint64_t n, int d, double v, std::uint64_t cells) {
  return std::visit(
      [&](const auto& s) -> Prior {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZeroPrior>) {
          return Prior::constant(0.0);
        } else if constexpr (std::is_same_v<T, ConstantPrior>) {
          return Prior::constant(s.c);
        } else if constexpr (std::is_same_v<T, AutoConstantPrior>) {
          return Prior::constant(default_prior_concentration(n, d, v));
        } else {
          if (s.alpha.size() != cells)
            throw ArgumentError("per-bin prior has " + std::to_string(s.alpha.size()) + " entries, expected " +
                                std::to_string(cells));
          return Prior::per_bin(s.alpha);
        }
      },
      spec);
}

int resolve_depth(const ModelConfig& config, std::uint64_t n) {
  if (const auto* e = std::get_if<ExplicitDepth>(&config.depth)) return e->K;
  if (n == 0) return 0;
  return auto_depth(n, config.d, config.v).K;
}

DyadicHistogram fit_batch(const PointSet& points, const ModelConfig& config) {
  config.validate();
  if (points.dim() != config.d)
    throw ArgumentError("points have dimension " + std::to_string(points.dim()) + ", model expects " +
                        std::to_string(config.d));
  const std::uint64_t n = points.size();
  const int K = resolve_depth(config, n);
  check_grid(config.d, K);
  const std::uint64_t cells = std::uint64_t{1} << (K * config.d);

  CellCounts counts(cells);
  for (std::uint64_t i = 0; i < n; ++i) {
    try {
      counts.add(bin_flat(points[i], K));
    } catch (const DomainError& e) {
      throw DomainError("point " + std::to_string(i) + ": " + e.what());
    }
  }
  return DyadicHistogram(config.d, K, std::move(counts), resolve_prior(config.prior, n, config.d, config.v, cells));
}

std::vector<double> posterior_mean_weights(const DyadicHistogram& hist) {
  if (hist.cell_count() > kDenseCellLimit) throw CapacityError("too many cells for a dense weight vector");
  const double total = hist.posterior_total();
  if (!(total > 0.0)) throw NumericalError("degenerate histogram: no samples and zero prior mass");
  std::vector<double> w(hist.cell_count());
  if (hist.prior().is_constant()) {
    std::fill(w.begin(), w.end(), hist.prior().constant_value() / total);
    hist.counts().for_each_nonzero([&](std::uint64_t k, std::uint64_t c) {
      w[k] = (hist.prior().constant_value() + static_cast<double>(c)) / total;
    });
  } else {
    for (std::uint64_t k = 0; k < w.size(); ++k) w[k] = hist.posterior_concentration(k) / total;
  }
  return w;
}

double density_at(const DyadicHistogram& hist, std::span<const double> point) {
  if (static_cast<int>(point.size()) != hist.dim()) throw ArgumentError("point dimension mismatch");
  const std::uint64_t flat = bin_flat(point, hist.depth());
  return std::ldexp(hist.weight(flat), hist.depth() * hist.dim());
}

namespace {

void append_center(PointSet& atoms, std::uint64_t flat, int d, int K) {
  const double scale = std::ldexp(1.0, -K);
  std::vector<double> x(static_cast<std::size_t>(d));
  const auto idx = unflatten(flat, d, K);
  for (int l = 0; l < d; ++l) x[static_cast<std::size_t>(l)] = (static_cast<double>(idx[static_cast<std::size_t>(l)]) + 0.5) * scale;
  atoms.push_back(x);
}

}  // namespace

DiscreteMeasure discretize(const DyadicHistogram& hist) {
  const double total = hist.posterior_total();
  if (!(total > 0.0)) throw NumericalError("degenerate histogram: no samples and zero prior mass");
  PointSet atoms(hist.dim());
  std::vector<double> weights;

  const bool sparse_support = hist.prior().is_constant() && hist.prior().constant_value() == 0.0;
  if (sparse_support) {
    hist.counts().for_each_nonzero([&](std::uint64_t k, std::uint64_t c) {
      append_center(atoms, k, hist.dim(), hist.depth());
      weights.push_back(static_cast<double>(c) / total);
    });
  } else {
    if (hist.cell_count() > kDenseCellLimit) throw CapacityError("too many cells to discretize");
    for (std::uint64_t k = 0; k < hist.cell_count(); ++k) {
      const double a = hist.posterior_concentration(k);
      if (a <= 0.0) continue;
      append_center(atoms, k, hist.dim(), hist.depth());
      weights.push_back(a / total);
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

std::vector<double> sample_posterior(const DyadicHistogram& hist, Rng& rng) {
  if (hist.cell_count() > kDenseCellLimit) throw CapacityError("too many cells for a dense posterior draw");
  const std::uint64_t cells = hist.cell_count();
  std::vector<double> logg(cells);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < cells; ++k) {
    const double a = hist.posterior_concentration(k);
    if (!(a > 0.0))
      throw NumericalError("improper posterior: cell " + std::to_string(k) +
                           " has zero concentration; supply a positive prior");
    logg[k] = rng.log_gamma_variate(a);
    max_log = std::max(max_log, logg[k]);
  }
  std::vector<double> w(cells);
  for (std::uint64_t k = 0; k < cells; ++k) w[k] = std::exp(logg[k] - max_log);
  const double s = stable_sum(w);
  for (double& x : w) x /= s;
  return w;
}

DyadicHistogram coarsen(const DyadicHistogram& hist, int target_K) {
  if (target_K < 0 || target_K > hist.depth())
    throw ArgumentError("coarsen target depth " + std::to_string(target_K) + " not in [0, " +
                        std::to_string(hist.depth()) + "]");
  if (target_K == hist.depth()) return hist;

  const int d = hist.dim();
  const int shift = hist.depth() - target_K;
  const std::uint64_t coarse_cells = std::uint64_t{1} << (target_K * d);
  const std::uint64_t fine_mask = (std::uint64_t{1} << hist.depth()) - 1;

  auto parent = [&](std::uint64_t flat) {
    std::uint64_t out = 0;
    for (int l = 0; l < d; ++l) {
      const std::uint64_t i = (flat >> (hist.depth() * (d - 1 - l))) & fine_mask;
      out = (out << target_K) | (i >> shift);
    }
    return out;
  };

  CellCounts counts(coarse_cells);
  hist.counts().for_each_nonzero([&](std::uint64_t k, std::uint64_t c) { counts.add(parent(k), c); });

  if (hist.prior().is_constant()) {
    const double c = std::ldexp(hist.prior().constant_value(), shift * d);
    return DyadicHistogram(d, target_K, std::move(counts), Prior::constant(c));
  }
  std::vector<double> alpha(coarse_cells, 0.0);
  const auto& fine = hist.prior().values();
  for (std::uint64_t k = 0; k < fine.size(); ++k) alpha[parent(k)] += fine[k];
  return DyadicHistogram(d, target_K, std::move(counts), Prior::per_bin(std::move(alpha)));
}

}  // namespace dyadic
