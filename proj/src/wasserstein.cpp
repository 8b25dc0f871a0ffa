#include "dyadic/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dyadic/errors.hpp"
#include "dyadic/transport.hpp"

namespace dyadic {

namespace {

void check_order(double v) {
  if (!(v >= 1.0) || !std::isfinite(v)) throw ArgumentError("Wasserstein order v must be >= 1");
}

bool is_small_integer(double v) { return v == std::floor(v) && v <= 64.0; }

// int_0^1 (p + (q - p) t)^v dt for p, q >= 0.
double mean_power_linear(double p, double q, double v) {
  if (is_small_integer(v)) {
    // (q^{v+1} - p^{v+1}) / ((v+1)(q-p)) = sum_k p^k q^{v-k} / (v+1)
    const int n = static_cast<int>(v);
    double sum = 0.0, pk = 1.0;
    for (int k = 0; k <= n; ++k) {
      sum += pk * std::pow(q, n - k);
      pk *= p;
    }
    return sum / (v + 1.0);
  }
  const double hi = std::max(p, q), lo = std::min(p, q);
  if (hi == 0.0) return 0.0;
  if (hi - lo > 1e-3 * hi)
    return (std::pow(hi, v + 1.0) - std::pow(lo, v + 1.0)) / ((v + 1.0) * (hi - lo));
  // Nearly constant integrand: Gauss-Legendre is accurate to rounding here.
  return boost::math::quadrature::gauss<double, 16>::integrate(
      [&](double t) { return std::pow(p + (q - p) * t, v); }, 0.0, 1.0);
}

// int_{z0}^{z1} |D(z)|^v dz for D affine with D(z0) = d0, D(z1) = d1.
double integrate_abs_affine(double z0, double z1, double d0, double d1, double v) {
  const double len = z1 - z0;
  if (len <= 0.0) return 0.0;
  if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
    const double frac = d0 / (d0 - d1);
    return len * frac * mean_power_linear(std::abs(d0), 0.0, v) +
           len * (1.0 - frac) * mean_power_linear(0.0, std::abs(d1), v);
  }
  return len * mean_power_linear(std::abs(d0), std::abs(d1), v);
}

// Bisecting Gauss-Kronrod with an absolute error floor of 1e-12 per unit
// length, so pieces where the integrand is at rounding level stop early.
template <class F>
double adaptive_gk(const F& f, double a, double b, int depth) {
  double err = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  if (depth == 0 || err <= std::max(1e-12 * (b - a), 1e-10 * std::abs(I))) return I;
  const double m = 0.5 * (a + b);
  return adaptive_gk(f, a, m, depth - 1) + adaptive_gk(f, m, b, depth - 1);
}

}  // namespace

double wasserstein_1d(const PiecewiseQuantile& q1, const PiecewiseQuantile& q2, double v) {
  check_order(v);
  const auto& a = q1.segments();
  const auto& b = q2.segments();
  std::size_t i = 0, j = 0;
  double z = 0.0, total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double z_next = std::min(a[i].z_hi, b[j].z_hi);
    if (z_next > z) {
      const double d0 = a[i].at(z) - b[j].at(z);
      const double d1 = a[i].at(z_next) - b[j].at(z_next);
      total += integrate_abs_affine(z, z_next, d0, d1, v);
      z = z_next;
    }
    if (a[i].z_hi <= z) ++i;
    if (j < b.size() && b[j].z_hi <= z) ++j;
  }
  return std::pow(std::max(total, 0.0), 1.0 / v);
}

double wasserstein_1d(const PiecewiseQuantile& q, const std::function<double(double)>& quantile, double v,
                      std::span<const double> breaks) {
  check_order(v);
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& s : q.segments()) cuts.push_back(s.z_hi);
  for (double z : breaks)
    if (z > 0.0 && z < 1.0) cuts.push_back(z);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& segs = q.segments();
  std::size_t s = 0;
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double z0 = cuts[c], z1 = cuts[c + 1];
    while (s + 1 < segs.size() && segs[s].z_hi <= z0) ++s;
    const auto& seg = segs[s];
    auto diff = [&](double z) { return seg.at(z) - quantile(z); };
    auto integrand = [&](double z) { return std::pow(std::abs(diff(z)), v); };
    // |diff|^v has a kink at every sign change; cut there so each piece is smooth.
    constexpr int probes = 16;
    std::vector<double> knots{z0};
    double z_prev = z0, d_prev = diff(z0);
    for (int k = 1; k <= probes; ++k) {
      const double z = k == probes ? z1 : z0 + k * (z1 - z0) / probes, d = diff(z);
      if ((d_prev < 0.0 && d > 0.0) || (d_prev > 0.0 && d < 0.0)) {
        std::uintmax_t iters = 64;
        const auto root = boost::math::tools::toms748_solve(diff, z_prev, z, d_prev, d,
                                                            boost::math::tools::eps_tolerance<double>(45), iters);
        knots.push_back(0.5 * (root.first + root.second));
      }
      z_prev = z;
      d_prev = d;
    }
    knots.push_back(z1);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
      total += adaptive_gk(integrand, knots[k], knots[k + 1], 12);
  }
  return std::pow(std::max(total, 0.0), 1.0 / v);
}

// ---------------------------------------------------------------------------
// Mass oracles

namespace {

constexpr int kOracleCellBits = 24;

std::vector<double> aggregate(const std::vector<double>& fine, int d, int K_fine, int K_coarse) {
  const int shift = K_fine - K_coarse;
  std::vector<double> out(std::size_t{1} << (K_coarse * d), 0.0);
  const std::uint64_t mask = (std::uint64_t{1} << K_fine) - 1;
  for (std::uint64_t k = 0; k < fine.size(); ++k) {
    std::uint64_t parent = 0;
    for (int l = 0; l < d; ++l) {
      const std::uint64_t i = (k >> (K_fine * (d - 1 - l))) & mask;
      parent = (parent << K_coarse) | (i >> shift);
    }
    out[parent] += fine[k];
  }
  return out;
}

}  // namespace

HistogramMassOracle::HistogramMassOracle(int d, int K, std::vector<double> weights)
    : d_(d), K_(K), weights_(std::move(weights)) {
  if (d < 1 || K < 0 || K * d > kOracleCellBits) throw ArgumentError("invalid histogram oracle geometry");
  if (weights_.size() != (std::size_t{1} << (K * d))) throw ArgumentError("histogram oracle weight count mismatch");
}

HistogramMassOracle::HistogramMassOracle(const DyadicHistogram& hist)
    : HistogramMassOracle(hist.dim(), hist.depth(), posterior_mean_weights(hist)) {}

int HistogramMassOracle::max_depth() const { return kOracleCellBits / d_; }

std::vector<double> HistogramMassOracle::masses(int k) const {
  if (k < 0 || k > max_depth()) throw ArgumentError("oracle depth out of range");
  if (k <= K_) return aggregate(weights_, d_, K_, k);
  // Uniform within each histogram cell.
  const int shift = k - K_;
  const double split = std::ldexp(1.0, -shift * d_);
  std::vector<double> out(std::size_t{1} << (k * d_));
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  for (std::uint64_t c = 0; c < out.size(); ++c) {
    std::uint64_t parent = 0;
    for (int l = 0; l < d_; ++l) {
      const std::uint64_t i = (c >> (k * (d_ - 1 - l))) & mask;
      parent = (parent << K_) | (i >> shift);
    }
    out[c] = weights_[parent] * split;
  }
  return out;
}

DiscreteMassOracle::DiscreteMassOracle(DiscreteMeasure mu) : mu_(std::move(mu)) {}

int DiscreteMassOracle::max_depth() const { return kOracleCellBits / mu_.dim(); }

std::vector<double> DiscreteMassOracle::masses(int k) const {
  if (k < 0 || k > max_depth()) throw ArgumentError("oracle depth out of range");
  std::vector<double> out(std::size_t{1} << (k * mu_.dim()), 0.0);
  for (std::size_t i = 0; i < mu_.size(); ++i) out[bin_flat(mu_.atom(i), k)] += mu_.weight(i);
  return out;
}

double dyadic_resolution(int d, double p, int k) {
  return std::ldexp(std::pow(static_cast<double>(d), 1.0 / p), -k);
}

double multires_bound(const DyadicMassOracle& mu, const DyadicMassOracle& nu, int K, double v, double p) {
  check_order(v);
  if (!(p >= 1.0)) throw ArgumentError("norm order p must be >= 1");
  if (K < 1) throw ArgumentError("multiresolution bound needs K >= 1");
  if (mu.dim() != nu.dim()) throw ArgumentError("oracles have different dimensions");
  if (K > mu.max_depth() || K > nu.max_depth()) throw CapacityError("oracle cannot resolve depth K");
  const int d = mu.dim();

  auto checked = [&](const DyadicMassOracle& o, int k, const std::vector<double>* finer) {
    auto m = o.masses(k);
    const double total = stable_sum(m);
    if (std::abs(total - 1.0) > 1e-12)
      throw NumericalError("oracle masses at depth " + std::to_string(k) + " sum to " + std::to_string(total));
    if (finer) {
      const auto agg = aggregate(*finer, d, k + 1, k);
      for (std::size_t c = 0; c < m.size(); ++c)
        if (std::abs(agg[c] - m[c]) > 1e-12)
          throw NumericalError("oracle masses at depth " + std::to_string(k) + " do not nest");
    }
    return m;
  };

  double discrepancy_sum = 0.0;
  std::vector<double> mu_next, nu_next;
  for (int k = K; k >= 1; --k) {
    auto a = checked(mu, k, k < K ? &mu_next : nullptr);
    auto b = checked(nu, k, k < K ? &nu_next : nullptr);
    double diff = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) diff += std::abs(a[c] - b[c]);
    discrepancy_sum += std::pow(dyadic_resolution(d, p, k - 1), v) * diff;
    mu_next = std::move(a);
    nu_next = std::move(b);
  }
  const double res_K = dyadic_resolution(d, p, K);
  if (discrepancy_sum == 0.0) return res_K;
  return std::pow(std::pow(res_K, v) + discrepancy_sum, 1.0 / v);
}

double wv_hist_vs_discrete(const DyadicHistogram& hist, const DiscreteMeasure& nu, double v, double p) {
  if (hist.dim() != nu.dim()) throw ArgumentError("histogram and measure have different dimensions");
  if (hist.dim() == 1) return wasserstein_1d(quantile_of_histogram(hist), quantile_of_discrete(nu), v);
  return ot_discrete(discretize(hist), nu, v, p);
}

}  // namespace dyadic
