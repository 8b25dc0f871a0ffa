#include "dyadic/haar.hpp"

#include <cmath>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {

double haar_father(double x) { return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0; }

double haar_mother(double x) {
  if (x >= 0.0 && x < 0.5) return 1.0;
  if (x >= 0.5 && x < 1.0) return -1.0;
  return 0.0;
}

double haar_wavelet(int u, std::span<const HaarFactor> kind, std::span<const std::uint64_t> shift,
                    std::span<const double> x) {
  const double scale = std::ldexp(1.0, u);
  double value = std::exp2(0.5 * static_cast<double>(x.size()) * u);
  for (std::size_t l = 0; l < x.size(); ++l) {
    const double arg = scale * x[l] - static_cast<double>(shift[l]);
    value *= kind[l] == HaarFactor::Father ? haar_father(arg) : haar_mother(arg);
  }
  return value;
}

std::vector<double> haar_estimate_2d(const PointSet& points, int J) {
  if (J < 0) throw ArgumentError("Haar resolution J must be >= 0");
  if (J > 12) throw CapacityError("Haar resolution J above 12");
  if (points.dim() != 2) throw ArgumentError("haar_estimate_2d needs 2-D points");
  if (points.empty()) throw ArgumentError("haar_estimate_2d needs at least one point");

  using Kind = std::array<HaarFactor, 2>;
  constexpr std::array<Kind, 3> kinds{Kind{HaarFactor::Mother, HaarFactor::Father},
                                      Kind{HaarFactor::Father, HaarFactor::Mother},
                                      Kind{HaarFactor::Mother, HaarFactor::Mother}};

  // Points with a coordinate of exactly 1 are treated as lying in the last
  // cell, as the histogram does.
  const double below_one = std::nextafter(1.0, 0.0);
  auto clamp_point = [&](std::span<const double> y) {
    std::array<double, 2> c{};
    for (int l = 0; l < 2; ++l) {
      if (!(y[l] >= 0.0 && y[l] <= 1.0)) throw DomainError("coordinate " + std::to_string(y[l]) + " outside [0,1]");
      c[l] = y[l] == 1.0 ? below_one : y[l];
    }
    return c;
  };

  // Coefficients beta[u][g][m]; Gamma^u_{G,m}(y) vanishes unless m is the
  // depth-u cell of y, so each point touches one m per (u, g).
  std::vector<std::array<std::vector<double>, 3>> beta(static_cast<std::size_t>(J));
  for (int u = 0; u < J; ++u)
    for (auto& b : beta[static_cast<std::size_t>(u)]) b.assign(std::size_t{1} << (2 * u), 0.0);

  const double inv_n = 1.0 / static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto y = clamp_point(points[i]);
    for (int u = 0; u < J; ++u) {
      const double scale = std::ldexp(1.0, u);
      const std::array<std::uint64_t, 2> m{static_cast<std::uint64_t>(std::floor(scale * y[0])),
                                           static_cast<std::uint64_t>(std::floor(scale * y[1]))};
      const std::size_t mi = static_cast<std::size_t>((m[0] << u) | m[1]);
      for (std::size_t g = 0; g < kinds.size(); ++g)
        beta[static_cast<std::size_t>(u)][g][mi] += inv_n * haar_wavelet(u, kinds[g], m, y);
    }
  }

  const std::uint64_t side = std::uint64_t{1} << J;
  std::vector<double> grid(side * side);
  const double cell = std::ldexp(1.0, -J);
  for (std::uint64_t t0 = 0; t0 < side; ++t0) {
    for (std::uint64_t t1 = 0; t1 < side; ++t1) {
      const std::array<double, 2> x{(static_cast<double>(t0) + 0.5) * cell, (static_cast<double>(t1) + 0.5) * cell};
      double f = 1.0;
      for (int u = 0; u < J; ++u) {
        const int down = J - u;
        const std::array<std::uint64_t, 2> m{t0 >> down, t1 >> down};
        const std::size_t mi = static_cast<std::size_t>((m[0] << u) | m[1]);
        for (std::size_t g = 0; g < kinds.size(); ++g)
          f += beta[static_cast<std::size_t>(u)][g][mi] * haar_wavelet(u, kinds[g], m, x);
      }
      grid[t0 * side + t1] = f;
    }
  }
  return grid;
}

}  // namespace dyadic
