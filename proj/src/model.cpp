#include "dyadic/model.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

void ModelConfig::validate() const {
  if (d < 1) throw ArgumentError("dimension d must be >= 1");
  if (!(v >= 1.0) || !std::isfinite(v)) throw ArgumentError("Wasserstein order v must be >= 1");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("norm order p must be >= 1");
  if (const auto* e = std::get_if<ExplicitDepth>(&depth); e && e->K < 0)
    throw ArgumentError("explicit depth must be nonnegative");
  if (const auto* c = std::get_if<ConstantPrior>(&prior); c && !(c->c >= 0.0 && std::isfinite(c->c)))
    throw ArgumentError("constant prior concentration must be finite and >= 0");
  if (const auto* pb = std::get_if<PerBinPrior>(&prior)) {
    for (double a : pb->alpha)
      if (!(a >= 0.0) || !std::isfinite(a))
        throw ArgumentError("per-bin prior concentrations must be finite and >= 0");
  }
}

int ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  return static_cast<int>(std::bit_width(n - 1));
}

DepthChoice auto_depth(std::uint64_t n, int d, double v) {
  if (n < 1) throw ArgumentError("auto_depth requires n >= 1");
  if (d < 1 || !(v >= 1.0)) throw ArgumentError("auto_depth requires d >= 1 and v >= 1");

  const double exponent = (d <= 2.0 * v) ? 2.0 * v : static_cast<double>(d);
  DepthChoice out;
  out.k_n = std::pow(static_cast<double>(n), 1.0 / exponent);

  const double rounded = std::round(exponent);
  if (std::abs(exponent - rounded) < 1e-12) {
    // K * e >= log2 n  <=>  K * e >= ceil(log2 n) when K * e is an integer.
    const auto e = static_cast<long long>(rounded);
    const long long L = ceil_log2(n);
    out.K = static_cast<int>((L + e - 1) / e);
  } else {
    const long double t = std::log2(static_cast<long double>(n)) / static_cast<long double>(exponent);
    out.K = static_cast<int>(std::ceil(t));
  }
  if (out.K > 62) throw CapacityError("resolved depth exceeds 62");
  out.b = std::uint64_t{1} << out.K;
  return out;
}

double default_prior_concentration(std::uint64_t n, int d, double v) {
  if (d < 1 || !(v >= 1.0)) throw ArgumentError("invalid (d, v)");
  const double nn = static_cast<double>(n == 0 ? 1 : n);
  if (d <= v) return 1.0;
  if (d <= 2.0 * v) return std::pow(nn, 0.5 - d / (2.0 * v));
  return std::pow(nn, -v / d);
}

double prior_budget(std::uint64_t n, int d, double v) {
  const double nn = static_cast<double>(n == 0 ? 1 : n);
  if (d <= 2.0 * v) return std::sqrt(nn);
  return std::pow(nn, 1.0 - v / d);
}

bool prior_exceeds_budget(double total_prior, std::uint64_t n, int d, double v) {
  return total_prior > std::ldexp(prior_budget(n, d, v), d) * (1.0 + 1e-12);
}

}  // namespace dyadic
