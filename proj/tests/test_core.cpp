#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "dyadic/errors.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/histogram.hpp"
#include "dyadic/io.hpp"
#include "dyadic/model.hpp"
#include "dyadic/rng.hpp"

using namespace dyadic;

namespace {

ModelConfig config(int d, double v, DepthRule depth, PriorSpec prior) {
  ModelConfig c;
  c.d = d;
  c.v = v;
  c.depth = depth;
  c.prior = prior;
  return c;
}

DyadicHistogram make_hist(int d, int K, const std::vector<std::uint64_t>& counts, Prior prior) {
  CellCounts cc(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k]) cc.add(k, counts[k]);
  return DyadicHistogram(d, K, std::move(cc), std::move(prior));
}

PointSet random_points(Rng& rng, int d, std::size_t n) {
  PointSet pts(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : x) c = rng.uniform();
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("bin_index examples") {
  const double a[] = {0.0};
  CHECK(bin_index(a, 2).index == std::vector<std::uint64_t>{0});
  CHECK(bin_index(a, 2).flat == 0);
  const double b[] = {0.3};
  CHECK(bin_index(b, 2).index == std::vector<std::uint64_t>{1});
  CHECK(bin_index(b, 2).flat == 1);
  const double c[] = {0.6, 0.1};
  const auto ci = bin_index(c, 1);
  CHECK(ci.index == std::vector<std::uint64_t>{1, 0});
  CHECK(ci.flat == 2);
}

TEST_CASE("bin_index boundary and errors") {
  const double one[] = {1.0};
  CHECK(bin_flat(one, 3) == 7);
  const double bad[] = {1.5};
  CHECK_THROWS_AS(bin_index(bad, 2), DomainError);
  const double neg[] = {-0.1};
  CHECK_THROWS_AS(bin_index(neg, 2), DomainError);
  const double nan[] = {std::nan("")};
  CHECK_THROWS_AS(bin_index(nan, 2), DomainError);
}

TEST_CASE("bin_index agrees with direct interval membership") {
  Rng rng(7);
  for (int K = 0; K <= 10; ++K) {
    const double b = std::ldexp(1.0, K);
    for (int t = 0; t < 1000; ++t) {
      const double x[] = {rng.uniform(), rng.uniform()};
      const auto ci = bin_index(x, K);
      for (int l = 0; l < 2; ++l) {
        const double lo = ci.index[l] / b, hi = (ci.index[l] + 1) / b;
        CHECK((x[l] >= lo && x[l] < hi));
      }
      CHECK(ci.flat == flatten(ci.index, K));
      CHECK(unflatten(ci.flat, 2, K) == ci.index);
    }
  }
}

TEST_CASE("auto_depth examples") {
  auto a = auto_depth(4, 1, 1);
  CHECK(a.k_n == doctest::Approx(2.0));
  CHECK(a.K == 1);
  CHECK(a.b == 2);
  auto b = auto_depth(1, 3, 2);
  CHECK(b.K == 0);
  CHECK(b.b == 1);
  auto c = auto_depth(4096, 2, 2);
  CHECK(c.k_n == doctest::Approx(8.0));
  CHECK(c.K == 3);
  CHECK(c.b == 8);
  CHECK(auto_depth(100, 1, 2).K == 2);
  CHECK(auto_depth(std::uint64_t{1} << 20, 1, 2).b == 32);
  // d > 2v uses n^(1/d)
  CHECK(auto_depth(1000, 3, 1).K == 4);
}

TEST_CASE("default prior concentration") {
  CHECK(default_prior_concentration(256, 1, 1) == 1.0);
  // d = 2v: the v < d <= 2v branch, exponent 1/2 - d/2v = -1/2
  CHECK(default_prior_concentration(256, 2, 1) == doctest::Approx(1.0 / 16));
  CHECK(default_prior_concentration(256, 5, 2) == doctest::Approx(0.1088).epsilon(1e-3));
  CHECK(default_prior_concentration(256, 3, 2) == doctest::Approx(std::pow(256.0, 0.5 - 0.75)));
}

TEST_CASE("fit_batch examples") {
  auto h = fit_batch(PointSet::line({0.1, 0.3, 0.6, 0.9}), config(1, 1, AutoDepth{}, ZeroPrior{}));
  CHECK(h.depth() == 1);
  CHECK(h.counts().at(0) == 2);
  CHECK(h.counts().at(1) == 2);

  auto e = fit_batch(PointSet(1), config(1, 1, AutoDepth{}, ConstantPrior{1.0}));
  CHECK(e.depth() == 0);
  CHECK(e.counts().at(0) == 0);
  CHECK(e.prior().at(0) == 1.0);

  PointSet same(1, std::vector<double>(100, 0.75));
  auto s = fit_batch(same, config(1, 2, AutoDepth{}, ZeroPrior{}));
  CHECK(s.depth() == 2);
  CHECK(s.counts().at(3) == 100);
  CHECK(s.counts().at(0) + s.counts().at(1) + s.counts().at(2) == 0);
}

TEST_CASE("fit_batch rejects bad points with their index") {
  try {
    fit_batch(PointSet::line({0.1, 0.2, 1.5}), config(1, 1, AutoDepth{}, ZeroPrior{}));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("point 2") != std::string::npos);
  }
}

TEST_CASE("posterior mean weights") {
  auto a = posterior_mean_weights(make_hist(1, 1, {2, 2}, Prior::constant(0)));
  CHECK(a == std::vector<double>{0.5, 0.5});
  auto b = posterior_mean_weights(make_hist(1, 1, {4, 0}, Prior::constant(1)));
  CHECK(b[0] == doctest::Approx(5.0 / 6));
  CHECK(b[1] == doctest::Approx(1.0 / 6));
  auto c = posterior_mean_weights(make_hist(1, 1, {0, 0}, Prior::per_bin({3, 1})));
  CHECK(c[0] == doctest::Approx(0.75));
  CHECK(c[1] == doctest::Approx(0.25));
  CHECK_THROWS_AS(posterior_mean_weights(make_hist(1, 1, {0, 0}, Prior::constant(0))), NumericalError);
}

TEST_CASE("density_at") {
  const double x[] = {0.42};
  CHECK(density_at(make_hist(1, 0, {3}, Prior::constant(0)), x) == 1.0);
  const double y[] = {0.7};
  CHECK(density_at(make_hist(1, 1, {1, 1}, Prior::constant(0)), y) == 1.0);
  const double z[] = {0.1, 0.1};
  CHECK(density_at(make_hist(2, 1, {5, 0, 0, 0}, Prior::constant(0)), z) == 4.0);
  const double w[] = {1.2, 0.1};
  CHECK_THROWS_AS(density_at(make_hist(2, 1, {5, 0, 0, 0}, Prior::constant(0)), w), DomainError);
}

TEST_CASE("discretize") {
  auto m = discretize(make_hist(1, 1, {1, 3}, Prior::constant(0)));
  REQUIRE(m.size() == 2);
  CHECK(m.atom(0)[0] == 0.25);
  CHECK(m.atom(1)[0] == 0.75);
  CHECK(m.weight(0) == 0.25);
  CHECK(m.weight(1) == 0.75);

  auto s = discretize(make_hist(1, 0, {1}, Prior::constant(0)));
  REQUIRE(s.size() == 1);
  CHECK(s.atom(0)[0] == 0.5);

  auto t = discretize(make_hist(2, 1, {0, 0, 0, 9}, Prior::constant(0)));
  REQUIRE(t.size() == 1);
  CHECK(t.atom(0)[0] == 0.75);
  CHECK(t.atom(0)[1] == 0.75);
  CHECK(t.weight(0) == 1.0);
}

TEST_CASE("sample_posterior") {
  Rng rng(11);
  auto flat = make_hist(1, 1, {0, 0}, Prior::constant(1));
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    auto w = sample_posterior(flat, rng);
    CHECK(std::abs(w[0] + w[1] - 1.0) <= 1e-12);
    sum += w[0];
  }
  CHECK(std::abs(sum / draws - 0.5) <= 0.005);

  auto tight = make_hist(1, 1, {0, 0}, Prior::constant(1e9));
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    auto w = sample_posterior(tight, rng);
    inside += std::abs(w[0] - 0.5) <= 1e-3 && std::abs(w[1] - 0.5) <= 1e-3;
  }
  CHECK(inside > 990);

  auto huge = make_hist(1, 1, {0, 0}, Prior::constant(1e16));
  auto w = sample_posterior(huge, rng);
  CHECK(std::abs(w[0] + w[1] - 1.0) <= 1e-12);

  CHECK_THROWS_AS(sample_posterior(make_hist(1, 1, {0, 0}, Prior::per_bin({1, 0})), rng), NumericalError);
}

TEST_CASE("coarsen") {
  auto h = make_hist(1, 2, {1, 2, 3, 4}, Prior::constant(0.5));
  CHECK(coarsen(h, 2) == h);
  auto c = coarsen(h, 1);
  CHECK(c.counts().at(0) == 3);
  CHECK(c.counts().at(1) == 7);
  CHECK(c.total_prior() == doctest::Approx(h.total_prior()));
  auto g = coarsen(make_hist(2, 1, {1, 1, 1, 1}, Prior::constant(0)), 0);
  CHECK(g.counts().at(0) == 4);
  CHECK_THROWS_AS(coarsen(h, 3), ArgumentError);
}

TEST_CASE("partition property") {
  Rng rng(3);
  for (int K = 0; K <= 5; ++K) {
    auto pts = random_points(rng, 2, 10000);
    auto h = fit_batch(pts, config(2, 1, ExplicitDepth{K}, ConstantPrior{0.3}));
    CHECK(h.sample_count() == 10000);
    auto w = posterior_mean_weights(h);
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("conjugacy idempotence") {
  Rng rng(4);
  auto a = random_points(rng, 2, 300);
  auto b = random_points(rng, 2, 500);
  PointSet ab(2);
  for (std::size_t i = 0; i < a.size(); ++i) ab.push_back(a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) ab.push_back(b[i]);
  const auto cfg = config(2, 1, ExplicitDepth{3}, ZeroPrior{});
  auto ha = fit_batch(a, cfg), hb = fit_batch(b, cfg), hab = fit_batch(ab, cfg);
  for (std::uint64_t k = 0; k < hab.cell_count(); ++k) CHECK(hab.counts().at(k) == ha.counts().at(k) + hb.counts().at(k));
}

TEST_CASE("coarsen agrees with grouped posterior weights") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    auto pts = random_points(rng, 2, 200);
    auto h = fit_batch(pts, config(2, 1, ExplicitDepth{4}, ConstantPrior{0.7}));
    auto fine = posterior_mean_weights(h);
    for (int K2 = 0; K2 <= 4; ++K2) {
      auto coarse = posterior_mean_weights(coarsen(h, K2));
      std::vector<double> grouped(coarse.size(), 0.0);
      for (std::uint64_t k = 0; k < fine.size(); ++k) {
        auto idx = unflatten(k, 2, 4);
        for (auto& i : idx) i >>= (4 - K2);
        grouped[flatten(idx, K2)] += fine[k];
      }
      for (std::size_t k = 0; k < coarse.size(); ++k) CHECK(std::abs(coarse[k] - grouped[k]) <= 1e-12);
    }
  }
}

TEST_CASE("sparse storage for fine grids") {
  PointSet pts(2, {0.1, 0.2, 0.9, 0.95});
  auto h = fit_batch(pts, config(2, 1, ExplicitDepth{13}, ZeroPrior{}));
  CHECK_FALSE(h.counts().is_dense());
  CHECK(h.counts().stored() == 2);
  CHECK(h.sample_count() == 2);
}

TEST_CASE("haar estimate examples") {
  Rng rng(8);
  auto pts = random_points(rng, 2, 17);
  for (double g : haar_estimate_2d(pts, 0)) CHECK(g == doctest::Approx(1.0));
  auto one = haar_estimate_2d(PointSet(2, {0.1, 0.1}), 1);
  REQUIRE(one.size() == 4);
  CHECK(one[0] == doctest::Approx(4.0));
  CHECK(std::abs(one[1]) <= 1e-12);
  CHECK(std::abs(one[2]) <= 1e-12);
  CHECK(std::abs(one[3]) <= 1e-12);
  CHECK_THROWS_AS(haar_estimate_2d(pts, -1), ArgumentError);
}

TEST_CASE("haar equivalence with the zero-prior histogram") {
  Rng rng(9);
  for (int J = 0; J <= 4; ++J) {
    for (int t = 0; t < 10; ++t) {
      const std::size_t n = 1 + rng.next_u64() % 200;
      auto pts = random_points(rng, 2, n);
      auto grid = haar_estimate_2d(pts, J);
      // Direct frequency oracle: floor(b x) per axis.
      const double b = std::ldexp(1.0, J);
      std::vector<double> freq(grid.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        freq[static_cast<std::size_t>(std::floor(pts[i][0] * b)) * static_cast<std::size_t>(b) +
             static_cast<std::size_t>(std::floor(pts[i][1] * b))] += b * b / n;
      for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(grid[k] - freq[k]) <= 1e-10);
    }
  }
}

TEST_CASE("histogram JSON round trip") {
  auto h = make_hist(2, 1, {1, 0, 3, 2}, Prior::per_bin({0.5, 0.25, 0, 1}));
  auto back = histogram_from_json(histogram_to_json(h));
  CHECK(back == h);
  auto c = make_hist(1, 2, {4, 0, 0, 1}, Prior::constant(0.1089));
  CHECK(histogram_from_json(histogram_to_json(c)) == c);
  CHECK_THROWS_AS(histogram_from_json("{\"d\":1}"), DomainError);
}

TEST_CASE("points CSV parsing") {
  std::istringstream in("0.1,0.2\n\n0.5,1\n");
  auto pts = read_points_csv(in);
  CHECK(pts.dim() == 2);
  CHECK(pts.size() == 2);
  std::istringstream bad("0.1,0.2\n0.5\n");
  try {
    read_points_csv(bad);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(config(0, 1, AutoDepth{}, ZeroPrior{}).validate(), ArgumentError);
  CHECK_THROWS_AS(config(1, 0.5, AutoDepth{}, ZeroPrior{}).validate(), ArgumentError);
  CHECK_THROWS_AS(config(1, 1, AutoDepth{}, ConstantPrior{-1}).validate(), ArgumentError);
  CHECK_THROWS_AS(fit_batch(PointSet::line({0.1}), config(1, 1, ExplicitDepth{2}, PerBinPrior{{1, 1}})), ArgumentError);
}
