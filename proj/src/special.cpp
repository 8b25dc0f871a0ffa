#include "dyadic/special.hpp"

#include <cmath>
#include <limits>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

// Continued fraction for I_x(a, b) * a / front.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

void check_shape(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw ArgumentError("beta shape parameters must be positive and finite");
}

}  // namespace

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double incomplete_beta(double a, double b, double x) {
  check_shape(a, b);
  if (std::isnan(x)) throw DomainError("incomplete beta argument is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
  return std::exp(log_front) * beta_cf(a, b, x) / a;
}

double beta_density(double a, double b, double x) {
  check_shape(a, b);
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0);
  if (x == 1.0) return b < 1.0 ? std::numeric_limits<double>::infinity() : (b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0);
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

double beta_quantile(double a, double b, double z) {
  check_shape(a, b);
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("quantile level outside [0,1]");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  // Start from the small-x asymptote I_x ~ x^a / (a B(a,b)) when it lands inside.
  double x = std::exp((std::log(z) + std::log(a) + log_beta(a, b)) / a);
  if (!(x > 0.0 && x < 1.0)) x = 0.5;
  for (int it = 0; it < 400; ++it) {
    const double f = incomplete_beta(a, b, x) - z;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    if (hi - lo <= 4e-16 * hi) return 0.5 * (lo + hi);
    const double pdf = beta_density(a, b, x);
    double next = (pdf > 0.0 && std::isfinite(pdf)) ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // Newton converges quadratically, so a step this small leaves rounding-level error.
    if (std::abs(next - x) <= 1e-13 * x) return next;
    x = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dyadic
