#include "dyadic/check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dyadic/concentration.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/histogram.hpp"
#include "dyadic/quantile.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/transport.hpp"
#include "dyadic/wasserstein.hpp"

namespace dyadic {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SuiteReport multinomial_suite(const CheckOptions& opt) {
  struct Case {
    std::uint64_t n;
    std::size_t k;
  };
  const Case grid[] = {{100, 4}, {1000, 16}, {10000, 64}};
  constexpr std::size_t reps = 2000;
  SuiteReport rep{"multinomial", true, INFINITY, {}};
  Rng rng = Rng::derive(opt.seed, {1});
  for (const auto& c : grid) {
    const std::vector<double> probs(c.k, 1.0 / static_cast<double>(c.k));
    const auto est = multinomial_concentration_mc(c.n, probs, reps, rng);
    const double limit = multinomial_bound(c.n, c.k) + 3.0 * est.std_error;
    rep.margin = std::min(rep.margin, limit - est.mean);
    rep.detail += fmt("(n=%g,k=%g) ", static_cast<double>(c.n), static_cast<double>(c.k)) +
                  fmt("E[Z/n]=%.4f limit=%.4f; ", est.mean, limit);
  }
  rep.pass = rep.margin >= 0.0;
  return rep;
}

SuiteReport dirichlet_suite(const CheckOptions& opt) {
  constexpr std::size_t reps = 100000;
  SuiteReport rep{"dirichlet", true, INFINITY, {}};
  Rng rng = Rng::derive(opt.seed, {2});
  for (std::size_t k : {2u, 8u, 32u}) {
    const std::vector<double> alpha(k, 1.0);
    for (double delta : {0.1, 0.5}) {
      const double frac = dirichlet_concentration_mc(alpha, delta, reps, rng);
      const double limit = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(reps));
      rep.margin = std::min(rep.margin, limit - frac);
      rep.detail += fmt("(k=%g,delta=%g) ", static_cast<double>(k), delta) + fmt("P=%.5f limit=%.5f; ", frac, limit);
    }
  }
  rep.pass = rep.margin >= 0.0;
  return rep;
}

SuiteReport haar_suite(const CheckOptions& opt) {
  SuiteReport rep{"haar", true, INFINITY, {}};
  Rng rng = Rng::derive(opt.seed, {3});
  double worst = 0.0;
  for (int J = 1; J <= 3; ++J) {
    for (int t = 0; t < 20; ++t) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 200.0);
      std::vector<double> coords(2 * n);
      for (auto& x : coords) x = rng.uniform();
      const PointSet pts(2, std::move(coords));
      const auto haar = haar_estimate_2d(pts, J);
      ModelConfig cfg;
      cfg.d = 2;
      cfg.depth = ExplicitDepth{J};
      const auto hist = fit_batch(pts, cfg);
      const auto w = posterior_mean_weights(hist);
      for (std::size_t c = 0; c < w.size(); ++c) worst = std::max(worst, std::abs(haar[c] - std::ldexp(w[c], 2 * J)));
    }
  }
  rep.margin = 1e-10 - worst;
  rep.pass = rep.margin >= 0.0;
  rep.detail = fmt("J in {1,2,3}, 20 datasets each: max |haar - histogram density| = %.3e (limit 1e-10)", worst);
  return rep;
}

DiscreteMeasure random_line_measure(Rng& rng) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 64.0);
  const bool on_grid = rng.uniform() < 0.5;  // repeated atoms and tied costs
  std::vector<double> xs(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = on_grid ? std::floor(rng.uniform() * 16.0) / 16.0 : rng.uniform();
    w[i] = on_grid && rng.uniform() < 0.3 ? 1.0 : rng.uniform() + 1e-3;
  }
  const double total = stable_sum(w);
  for (auto& x : w) x /= total;
  // Renormalize once more so the sum is 1 to rounding.
  const double again = stable_sum(w);
  for (auto& x : w) x /= again;
  return DiscreteMeasure(PointSet(1, std::move(xs)), std::move(w));
}

SuiteReport ot_suite(const CheckOptions& opt) {
  const OtSolver solver = opt.ot ? opt.ot : OtSolver(ot_discrete);
  SuiteReport rep{"ot", true, INFINITY, {}};
  Rng rng = Rng::derive(opt.seed, {4});
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const auto mu = random_line_measure(rng);
    const auto nu = random_line_measure(rng);
    for (double v : {1.0, 2.0}) {
      const double exact = wasserstein_1d(quantile_of_discrete(mu), quantile_of_discrete(nu), v);
      const double got = solver(mu, nu, v, 1.0);
      const double err = std::isfinite(got) ? std::abs(got - exact) : INFINITY;
      worst = std::max(worst, err);
    }
  }
  rep.margin = 1e-9 - worst;
  rep.pass = rep.margin >= 0.0;
  rep.detail = fmt("500 random 1-D pairs, v in {1,2}: max |ot - quantile formula| = %.3e (limit 1e-9)", worst);
  return rep;
}

}  // namespace

const std::vector<std::string>& check_suite_names() {
  static const std::vector<std::string> names{"multinomial", "dirichlet", "haar", "ot"};
  return names;
}

SuiteReport run_check_suite(std::string_view name, const CheckOptions& options) {
  if (name == "multinomial") return multinomial_suite(options);
  if (name == "dirichlet") return dirichlet_suite(options);
  if (name == "haar") return haar_suite(options);
  if (name == "ot") return ot_suite(options);
  throw ArgumentError("unknown check suite '" + std::string(name) + "'");
}

}  // namespace dyadic
