#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dyadic/errors.hpp"
#include "dyadic/histogram.hpp"
#include "dyadic/quantile.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/transport.hpp"
#include "dyadic/wasserstein.hpp"

using namespace dyadic;

namespace {

DiscreteMeasure point_mass(std::initializer_list<double> x) {
  return DiscreteMeasure(PointSet(static_cast<int>(x.size()), std::vector<double>(x)), {1.0});
}

std::vector<double> random_weights(Rng& rng, std::size_t b, double zero_prob) {
  std::vector<double> w(b);
  double s = 0.0;
  for (auto& x : w) {
    x = rng.uniform() < zero_prob ? 0.0 : rng.uniform();
    s += x;
  }
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : w) x /= s;
  return w;
}

// Brute-force midpoint rule on a fine grid, independent of the segment merge.
double brute_wv(const PiecewiseQuantile& a, const PiecewiseQuantile& b, double v) {
  const int N = 200000;
  double s = 0.0;
  for (int i = 0; i < N; ++i) {
    const double z = (i + 0.5) / N;
    s += std::pow(std::abs(a(z) - b(z)), v);
  }
  return std::pow(s / N, 1.0 / v);
}

}  // namespace

TEST_CASE("quantile_of_weights examples") {
  const double u[] = {0.5, 0.5};
  auto q = quantile_of_weights(u);
  for (double z : {0.0, 0.2, 0.5, 0.9}) CHECK(q(z) == doctest::Approx(z));
  const double l[] = {1.0, 0.0};
  auto ql = quantile_of_weights(l);
  for (double z : {0.0, 0.3, 0.8}) CHECK(ql(z) == doctest::Approx(z / 2));
  const double r[] = {0.0, 1.0};
  auto qr = quantile_of_weights(r);
  for (double z : {0.0, 0.3, 0.8}) CHECK(qr(z) == doctest::Approx(0.5 + z / 2));
}

TEST_CASE("quantile_of_histogram needs d = 1") {
  CellCounts c(4);
  c.add(0);
  DyadicHistogram h(2, 1, c, Prior::constant(0));
  CHECK_THROWS_AS(quantile_of_histogram(h), ArgumentError);
}

TEST_CASE("quantile_of_discrete examples") {
  auto q = quantile_of_discrete(point_mass({0.3}));
  CHECK(q(0.0) == 0.3);
  CHECK(q(1.0) == 0.3);
  DiscreteMeasure two(PointSet::line({0.8, 0.2}), {0.5, 0.5});
  auto q2 = quantile_of_discrete(two);
  CHECK(q2(0.25) == 0.2);
  CHECK(q2(0.75) == 0.8);
}

TEST_CASE("wasserstein_1d examples") {
  Rng rng(1);
  auto w = random_weights(rng, 8, 0.3);
  auto q = quantile_of_weights(w);
  for (double v : {1.0, 1.5, 2.0, 3.0}) CHECK(wasserstein_1d(q, q, v) == 0.0);
  CHECK(wasserstein_1d(quantile_of_discrete(point_mass({0.0})), quantile_of_discrete(point_mass({1.0})), 1) == doctest::Approx(1.0));
  const double l[] = {1.0, 0.0}, r[] = {0.0, 1.0};
  for (double v : {1.0, 1.7, 2.0, 4.0})
    CHECK(wasserstein_1d(quantile_of_weights(l), quantile_of_weights(r), v) == doctest::Approx(0.5).epsilon(1e-13));
  const double u[] = {1.0};
  CHECK(wasserstein_1d(quantile_of_weights(u), quantile_of_discrete(point_mass({0.5})), 2) ==
        doctest::Approx(std::sqrt(1.0 / 12)).epsilon(1e-14));
  CHECK_THROWS_AS(wasserstein_1d(quantile_of_weights(u), quantile_of_weights(u), 0.5), ArgumentError);
}

TEST_CASE("wasserstein_1d matches brute-force integration") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    auto a = quantile_of_weights(random_weights(rng, 8, 0.3));
    auto b = quantile_of_weights(random_weights(rng, 4, 0.3));
    for (double v : {1.0, 1.3, 2.0, 2.5, 3.0}) CHECK(wasserstein_1d(a, b, v) == doctest::Approx(brute_wv(a, b, v)).epsilon(1e-6));
  }
}

TEST_CASE("wasserstein_1d symmetry and monotonicity in v") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    auto a = quantile_of_weights(random_weights(rng, 16, 0.4));
    auto b = quantile_of_weights(random_weights(rng, 8, 0.4));
    double prev = 0.0;
    for (double v : {1.0, 1.5, 2.0, 3.0, 4.5}) {
      const double ab = wasserstein_1d(a, b, v);
      CHECK(std::abs(ab - wasserstein_1d(b, a, v)) <= 1e-12);
      CHECK(ab >= prev - 1e-9);
      CHECK(ab <= 1.0);
      prev = ab;
    }
  }
}

TEST_CASE("translation exactness") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t b = 16;
    const std::size_t width = 1 + rng.next_u64() % 8;
    const std::size_t shift = 1 + rng.next_u64() % (b - width);
    std::vector<double> base(b, 0.0), moved(b, 0.0);
    auto pattern = random_weights(rng, width, 0.0);
    for (std::size_t k = 0; k < width; ++k) {
      base[k] = pattern[k];
      moved[k + shift] = pattern[k];
    }
    for (double v : {1.0, 2.0, 2.5})
      CHECK(wasserstein_1d(quantile_of_weights(base), quantile_of_weights(moved), v) ==
            doctest::Approx(static_cast<double>(shift) / b).epsilon(1e-12));
  }
}

TEST_CASE("continuous quantile route") {
  const double u[] = {1.0};
  auto q = quantile_of_weights(u);
  CHECK(wasserstein_1d(q, [](double z) { return z; }, 2.0) <= 1e-12);
  // Uniform vs Beta-like quantile z^2: W_1 = int |z - z^2| = 1/6
  CHECK(wasserstein_1d(q, [](double z) { return z * z; }, 1.0) == doctest::Approx(1.0 / 6).epsilon(1e-10));
  // W_2^2 = int (z - z^2)^2 = 1/30
  CHECK(wasserstein_1d(q, [](double z) { return z * z; }, 2.0) == doctest::Approx(std::sqrt(1.0 / 30)).epsilon(1e-10));
  // Sign change inside a piece: point mass at 0.5 vs uniform, v = 3
  auto pm = quantile_of_discrete(point_mass({0.5}));
  CHECK(wasserstein_1d(pm, [](double z) { return z; }, 3.0) == doctest::Approx(std::pow(1.0 / 32, 1.0 / 3)).epsilon(1e-10));
}

TEST_CASE("multires_bound examples") {
  const double w[] = {0.25, 0.25, 0.5, 0.0};
  HistogramMassOracle h(1, 2, {w, w + 4});
  CHECK(multires_bound(h, h, 2, 1, 1) == 0.25);
  CHECK(multires_bound(h, h, 3, 2, 1) == 0.125);
  HistogramMassOracle left(1, 1, {1.0, 0.0}), right(1, 1, {0.0, 1.0});
  CHECK(multires_bound(left, right, 1, 1, 1) == doctest::Approx(2.5));
  std::vector<double> w2(16, 1.0 / 16);
  HistogramMassOracle flat(2, 2, w2);
  CHECK(multires_bound(flat, flat, 2, 2, 2) == std::sqrt(2.0) / 4);
  HistogramMassOracle bad(1, 1, {0.7, 0.7});
  CHECK_THROWS_AS(multires_bound(bad, left, 1, 1, 1), NumericalError);
}

TEST_CASE("multires_bound dominates the exact distance") {
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    auto a = random_weights(rng, 8, 0.3), b = random_weights(rng, 8, 0.3);
    HistogramMassOracle ma(1, 3, a), mb(1, 3, b);
    for (double v : {1.0, 2.0, 3.0}) {
      const double exact = wasserstein_1d(quantile_of_weights(a), quantile_of_weights(b), v);
      for (int K = 1; K <= 6; ++K) CHECK(multires_bound(ma, mb, K, v, 1) >= exact);
    }
  }
}

TEST_CASE("discrete mass oracle") {
  DiscreteMeasure mu(PointSet(2, {0.1, 0.1, 0.9, 0.6}), {0.25, 0.75});
  DiscreteMassOracle o(mu);
  auto m1 = o.masses(1);
  CHECK(m1 == std::vector<double>{0.25, 0.0, 0.0, 0.75});
  CHECK(o.masses(0) == std::vector<double>{1.0});
}

TEST_CASE("wv_hist_vs_discrete") {
  CellCounts one(1);
  one.add(0, 3);
  DyadicHistogram single(2, 0, one, Prior::constant(0));
  CHECK(wv_hist_vs_discrete(single, point_mass({0.5, 0.5}), 2, 2) == 0.0);

  CellCounts four(4);
  for (int k = 0; k < 4; ++k) four.add(k);
  DyadicHistogram flat(2, 1, four, Prior::constant(0));
  CHECK(wv_hist_vs_discrete(flat, discretize(flat), 2, 2) == doctest::Approx(0.0).epsilon(1e-14));

  Rng rng(6);
  CellCounts c(8);
  for (int k = 0; k < 8; ++k) c.add(k, rng.next_u64() % 5);
  DyadicHistogram h(1, 3, c, Prior::constant(0.5));
  DiscreteMeasure nu(PointSet::line({0.1, 0.45, 0.8}), {0.2, 0.3, 0.5});
  CHECK(wv_hist_vs_discrete(h, nu, 2, 1) == wasserstein_1d(quantile_of_histogram(h), quantile_of_discrete(nu), 2));
  CHECK_THROWS_AS(wv_hist_vs_discrete(flat, nu, 1, 1), ArgumentError);
}
