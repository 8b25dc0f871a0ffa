#include "dyadic/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "dyadic/errors.hpp"
#include "dyadic/special.hpp"

namespace dyadic {

namespace {

void check_split(double a, double e) {
  if (!(e > 0.0 && e < 0.5)) throw ArgumentError("split requires 0 < e < 0.5");
  if (!(a > 0.0 && a < 1.0 / (e * e))) throw ArgumentError("split requires 0 < a < 1/e^2");
}

double split_b_of(double a, double e) { return (1.0 - a * e * e) / (2.0 * e); }

// CDF and quantile of the lower half: F(x) = a x^2 / 2 + b x on [0, e].
double split_lower_cdf(double a, double b, double x) { return 0.5 * a * x * x + b * x; }

double split_lower_quantile(double a, double b, double z) {
  if (std::abs(a) < 1e-12) return z / b;
  return 2.0 * z / (b + std::sqrt(b * b + 2.0 * a * z));
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s, std::string_view what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("ground truth: cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return x;
}

void require_1d(const GroundTruth& gt) {
  if (gt.dim() != 1) throw ArgumentError("cdf/quantile need a 1-D ground truth");
}

double sample_1d(const GroundTruth& gt, Rng& rng) {
  switch (gt.kind()) {
    case GroundTruth::Kind::Uniform:
      return rng.uniform();
    case GroundTruth::Kind::BetaSym: {
      const double x = gt.beta_x();
      if (x == 1.0) return rng.uniform();
      return beta_quantile(x, x, rng.uniform());
    }
    case GroundTruth::Kind::Split: {
      const double a = gt.split_a(), e = gt.split_e(), b = gt.split_b();
      const double u = rng.uniform();
      if (u < 0.5) return std::min(split_lower_quantile(a, b, u), std::nextafter(e, 0.0));
      const double x = (1.0 - e) + split_lower_quantile(a, b, u - 0.5);
      return std::clamp(x, 1.0 - e, std::nextafter(1.0, 0.0));
    }
    case GroundTruth::Kind::Product:
      break;
  }
  throw ArgumentError("expected a 1-D ground truth");
}

}  // namespace

GroundTruth GroundTruth::uniform(int d) {
  if (d < 1) throw ArgumentError("uniform dimension must be >= 1");
  return GroundTruth(Kind::Uniform, d, 0.0, 0.0);
}

GroundTruth GroundTruth::beta_sym(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError("beta parameter must be positive");
  return GroundTruth(Kind::BetaSym, 1, x, 0.0);
}

GroundTruth GroundTruth::split(double a, double e) {
  check_split(a, e);
  return GroundTruth(Kind::Split, 1, a, e);
}

GroundTruth GroundTruth::product(std::vector<GroundTruth> components) {
  if (components.empty()) throw ArgumentError("product needs at least one component");
  for (const auto& c : components)
    if (c.dim() != 1 || c.kind() == Kind::Product) throw ArgumentError("product components must be 1-D laws");
  GroundTruth gt(Kind::Product, static_cast<int>(components.size()), 0.0, 0.0);
  gt.components_ = std::move(components);
  return gt;
}

double GroundTruth::split_b() const { return split_b_of(p0_, p1_); }

std::string GroundTruth::name() const {
  switch (kind_) {
    case Kind::Uniform:
      return "uniform:" + std::to_string(dim_);
    case Kind::BetaSym:
      return "beta:" + shortest(p0_);
    case Kind::Split:
      return "split:" + shortest(p0_) + "," + shortest(p1_);
    case Kind::Product: {
      std::string s = "product:";
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (i) s += "|";
        s += components_[i].name();
      }
      return s;
    }
  }
  return {};
}

GroundTruth parse_ground_truth(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("ground truth '" + std::string(text) + "' lacks a ':'");
  const std::string_view kind = text.substr(0, colon), args = text.substr(colon + 1);
  try {
    if (kind == "uniform") {
      const double d = parse_number(args, "dimension");
      if (d != std::floor(d) || d < 1 || d > 64) throw ConfigError("uniform dimension must be a positive integer");
      return GroundTruth::uniform(static_cast<int>(d));
    }
    if (kind == "beta") return GroundTruth::beta_sym(parse_number(args, "beta parameter"));
    if (kind == "split") {
      const auto comma = args.find(',');
      if (comma == std::string_view::npos) throw ConfigError("split needs 'split:a,e'");
      return GroundTruth::split(parse_number(args.substr(0, comma), "a"), parse_number(args.substr(comma + 1), "e"));
    }
    if (kind == "product") {
      std::vector<GroundTruth> parts;
      std::size_t start = 0;
      for (;;) {
        const auto bar = args.find('|', start);
        parts.push_back(parse_ground_truth(args.substr(start, bar == std::string_view::npos ? bar : bar - start)));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
      }
      return GroundTruth::product(std::move(parts));
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("ground truth: ") + e.what());
  }
  throw ConfigError("unknown ground truth kind '" + std::string(kind) + "'");
}

double split_density(double a, double e, double x) {
  check_split(a, e);
  const double b = split_b_of(a, e);
  if (x >= 0.0 && x < e) return a * x + b;
  if (x >= 1.0 - e && x < 1.0) return a * x + b - (1.0 - e) * a;
  return 0.0;
}

double density(const GroundTruth& gt, std::span<const double> x) {
  if (static_cast<int>(x.size()) != gt.dim()) throw ArgumentError("point dimension mismatch");
  switch (gt.kind()) {
    case GroundTruth::Kind::Uniform:
      for (double c : x)
        if (c < 0.0 || c > 1.0) return 0.0;
      return 1.0;
    case GroundTruth::Kind::BetaSym:
      return beta_density(gt.beta_x(), gt.beta_x(), x[0]);
    case GroundTruth::Kind::Split:
      return split_density(gt.split_a(), gt.split_e(), x[0]);
    case GroundTruth::Kind::Product: {
      double p = 1.0;
      for (std::size_t l = 0; l < x.size(); ++l) p *= density(gt.components()[l], x.subspan(l, 1));
      return p;
    }
  }
  return 0.0;
}

double cdf(const GroundTruth& gt, double x) {
  require_1d(gt);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cdf argument outside [0,1]");
  const GroundTruth& g = gt.kind() == GroundTruth::Kind::Product ? gt.components()[0] : gt;
  switch (g.kind()) {
    case GroundTruth::Kind::Uniform:
      return x;
    case GroundTruth::Kind::BetaSym:
      return incomplete_beta(g.beta_x(), g.beta_x(), x);
    case GroundTruth::Kind::Split: {
      const double a = g.split_a(), e = g.split_e(), b = g.split_b();
      if (x < e) return split_lower_cdf(a, b, x);
      if (x < 1.0 - e) return 0.5;
      return std::min(1.0, 0.5 + split_lower_cdf(a, b, x - (1.0 - e)));
    }
    case GroundTruth::Kind::Product:
      break;
  }
  throw ArgumentError("unsupported ground truth");
}

double quantile(const GroundTruth& gt, double z) {
  require_1d(gt);
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("quantile level outside [0,1]");
  const GroundTruth& g = gt.kind() == GroundTruth::Kind::Product ? gt.components()[0] : gt;
  switch (g.kind()) {
    case GroundTruth::Kind::Uniform:
      return z;
    case GroundTruth::Kind::BetaSym: {
      const double x = g.beta_x();
      if (x == 1.0) return z;
      // Symmetry keeps the inversion on the side where z is resolved best.
      return z <= 0.5 ? beta_quantile(x, x, z) : 1.0 - beta_quantile(x, x, 1.0 - z);
    }
    case GroundTruth::Kind::Split: {
      const double a = g.split_a(), e = g.split_e(), b = g.split_b();
      if (z <= 0.5) return std::min(split_lower_quantile(a, b, z), e);
      return std::min(1.0, (1.0 - e) + std::min(split_lower_quantile(a, b, z - 0.5), e));
    }
    case GroundTruth::Kind::Product:
      break;
  }
  throw ArgumentError("unsupported ground truth");
}

std::vector<double> quantile_breakpoints(const GroundTruth& gt) {
  require_1d(gt);
  const GroundTruth& g = gt.kind() == GroundTruth::Kind::Product ? gt.components()[0] : gt;
  if (g.kind() == GroundTruth::Kind::Split) return {0.5};
  return {};
}

PointSet sample(const GroundTruth& gt, Rng& rng, std::size_t n) {
  const int d = gt.dim();
  std::vector<double> coords;
  coords.reserve(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    if (gt.kind() == GroundTruth::Kind::Product) {
      for (const auto& c : gt.components()) coords.push_back(sample_1d(c, rng));
    } else if (gt.kind() == GroundTruth::Kind::Uniform) {
      for (int l = 0; l < d; ++l) coords.push_back(rng.uniform());
    } else {
      coords.push_back(sample_1d(gt, rng));
    }
  }
  return PointSet(d, std::move(coords));
}

DiscreteMeasure discretize_ground_truth(const GroundTruth& gt, std::size_t m, Rng& rng) {
  if (m < 1) throw ArgumentError("truth discretization needs m >= 1");
  return DiscreteMeasure::empirical(sample(gt, rng, m));
}

}  // namespace dyadic
