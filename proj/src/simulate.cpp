#include "dyadic/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "dyadic/errors.hpp"
#include "dyadic/histogram.hpp"
#include "dyadic/io.hpp"
#include "dyadic/quantile.hpp"
#include "dyadic/transport.hpp"
#include "dyadic/wasserstein.hpp"

namespace dyadic {

namespace {

constexpr Estimator kAllEstimators[] = {Estimator::Empirical, Estimator::HistZeroPrior, Estimator::HistDefaultPrior,
                                        Estimator::HistDiscretized};

constexpr std::uint64_t kTruthStreamTag = 0x7472757468ULL;

bool exact_uniform_1d(const GroundTruth& gt) {
  const GroundTruth& g = gt.kind() == GroundTruth::Kind::Product ? gt.components()[0] : gt;
  return g.kind() == GroundTruth::Kind::Uniform ||
         (g.kind() == GroundTruth::Kind::BetaSym && g.beta_x() == 1.0);
}

// The truth as seen by the error computation.
class Truth {
 public:
  Truth(const ExperimentSpec& spec)
      : gt_(spec.gt), v_(spec.v), p_(spec.p) {
    if (gt_.dim() == 1) {
      if (exact_uniform_1d(gt_)) identity_.emplace(std::vector<QuantileSegment>{{0.0, 1.0, 0.0, 1.0}});
      breaks_ = quantile_breakpoints(gt_);
    } else {
      // One draw per experiment, shared by every estimator and replicate.
      Rng rng = Rng::derive(spec.seed, {kTruthStreamTag, *spec.truth_m});
      discrete_.emplace(discretize_ground_truth(gt_, *spec.truth_m, rng));
    }
  }

  double to_quantile(const PiecewiseQuantile& q) const {
    if (identity_) return wasserstein_1d(q, *identity_, v_);
    return wasserstein_1d(q, [this](double z) { return quantile(gt_, z); }, v_, breaks_);
  }

  double to_discrete(const DiscreteMeasure& mu) const { return ot_discrete(mu, *discrete_, v_, p_); }

  int dim() const { return gt_.dim(); }

 private:
  const GroundTruth& gt_;
  double v_, p_;
  std::optional<PiecewiseQuantile> identity_;
  std::vector<double> breaks_;
  std::optional<DiscreteMeasure> discrete_;
};

ModelConfig model_for(const ExperimentSpec& spec, PriorSpec prior) {
  ModelConfig m;
  m.d = spec.gt.dim();
  m.v = spec.v;
  m.p = spec.p;
  if (spec.depth) m.depth = ExplicitDepth{*spec.depth};
  m.prior = std::move(prior);
  return m;
}

double replicate_error(const ExperimentSpec& spec, const Truth& truth, Estimator est, std::uint64_t n, Rng& rng) {
  const PointSet data = sample(spec.gt, rng, n);
  const bool one_d = truth.dim() == 1;
  switch (est) {
    case Estimator::Empirical: {
      const auto mu = DiscreteMeasure::empirical(data);
      return one_d ? truth.to_quantile(quantile_of_discrete(mu)) : truth.to_discrete(mu);
    }
    case Estimator::HistZeroPrior:
    case Estimator::HistDefaultPrior: {
      const PriorSpec prior = est == Estimator::HistZeroPrior ? PriorSpec{ZeroPrior{}} : PriorSpec{AutoConstantPrior{}};
      const auto hist = fit_batch(data, model_for(spec, prior));
      return one_d ? truth.to_quantile(quantile_of_histogram(hist)) : truth.to_discrete(discretize(hist));
    }
    case Estimator::HistDiscretized: {
      const auto hist = fit_batch(data, model_for(spec, AutoConstantPrior{}));
      const auto mu = discretize(hist);
      return one_d ? truth.to_quantile(quantile_of_discrete(mu)) : truth.to_discrete(mu);
    }
  }
  return 0.0;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(std::string_view value) {
  std::string v = trim(value);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("unterminated list '" + v + "'");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::string item = unquote(trim(std::string_view(v).substr(start, comma == std::string::npos ? comma : comma - start)));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_value(std::string_view key, std::string_view text) {
  const std::string s = unquote(trim(text));
  T x{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("invalid value '" + s + "' for " + std::string(key));
  return x;
}

}  // namespace

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Empirical:
      return "empirical";
    case Estimator::HistZeroPrior:
      return "hist_zero_prior";
    case Estimator::HistDefaultPrior:
      return "hist_default_prior";
    case Estimator::HistDiscretized:
      return "hist_discretized";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  for (Estimator e : kAllEstimators)
    if (estimator_name(e) == name) return e;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (!(v >= 1.0) || !std::isfinite(v)) throw ConfigError("v must be >= 1");
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  if (reps < 2) throw ConfigError("reps must be >= 2 (the confidence interval needs a variance)");
  if (estimators.empty()) throw ConfigError("at least one estimator is required");
  for (std::size_t i = 0; i < estimators.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (estimators[i] == estimators[j]) throw ConfigError("estimator listed twice");
  if (log2_n.empty()) throw ConfigError("log2_n must list at least one sample size");
  for (std::size_t i = 0; i < log2_n.size(); ++i) {
    if (log2_n[i] < 0 || log2_n[i] > 30) throw ConfigError("log2_n values must lie in [0, 30]");
    if (i > 0 && log2_n[i] <= log2_n[i - 1]) throw ConfigError("log2_n values must be distinct and increasing");
  }
  if (depth && (*depth < 0 || *depth * gt.dim() > 24)) throw ConfigError("depth override out of range");
  if (gt.dim() >= 2) {
    if (!truth_m) throw ConfigError("d >= 2 needs truth_m (size of the truth discretization)");
    if (*truth_m < 1 || *truth_m > kMaxTransportAtoms)
      throw ConfigError("truth_m must lie in [1, " + std::to_string(kMaxTransportAtoms) + "]");
    const bool has_empirical = std::find(estimators.begin(), estimators.end(), Estimator::Empirical) != estimators.end();
    if (has_empirical && (std::uint64_t{1} << log2_n.back()) > kMaxTransportAtoms)
      throw ConfigError("empirical estimator in d >= 2 is limited to n <= " + std::to_string(kMaxTransportAtoms));
  }
}

bool ExperimentResult::operator==(const ExperimentResult& o) const {
  if (rows.size() != o.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = o.rows[i];
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    if (a.estimator != b.estimator || a.n != b.n || !same(a.mean_w, b.mean_w) || !same(a.sd_w, b.sd_w) ||
        !same(a.log2_mean, b.log2_mean) || !same(a.ci_lo, b.ci_lo) || !same(a.ci_hi, b.ci_hi))
      return false;
  }
  return true;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<Estimator> ests = spec.estimators;
  std::sort(ests.begin(), ests.end());
  const Truth truth(spec);

  struct Cell {
    Estimator est;
    std::uint64_t n;
  };
  std::vector<Cell> cells;
  for (Estimator e : ests)
    for (int l : spec.log2_n) cells.push_back({e, std::uint64_t{1} << l});
  const std::size_t reps = static_cast<std::size_t>(spec.reps);
  const std::size_t jobs = cells.size() * reps;
  std::vector<double> errors(jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs || failed.load()) return;
      const Cell& c = cells[job / reps];
      const std::size_t rep = job % reps;
      try {
        Rng rng = Rng::derive(spec.seed, {static_cast<std::uint64_t>(c.est) + 1, c.n, rep});
        errors[job] = replicate_error(spec, truth, c.est, c.n, rng);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const std::span<const double> w(errors.data() + ci * reps, reps);
    const double mean = stable_sum(w) / static_cast<double>(reps);
    double ss = 0.0;
    for (double x : w) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
    ExperimentRow row{cells[ci].est, cells[ci].n, mean, sd, 0.0, 0.0, 0.0};
    if (mean > 0.0) {
      row.log2_mean = std::log2(mean);
      std::tie(row.ci_lo, row.ci_hi) = delta_ci(mean, sd, spec.reps);
    } else {
      row.log2_mean = row.ci_lo = row.ci_hi = -std::numeric_limits<double>::infinity();
    }
    result.rows.push_back(row);
  }
  return result;
}

std::pair<double, double> delta_ci(double mean, double sd, int reps, double level) {
  if (!(mean > 0.0)) throw ArgumentError("delta_ci needs mean > 0");
  if (!(sd >= 0.0)) throw ArgumentError("delta_ci needs sd >= 0");
  if (reps < 2) throw ArgumentError("delta_ci needs reps >= 2");
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must lie in (0,1)");
  const double z = level == 0.95 ? kZ975 : boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  const double half = z * sd / (mean * std::sqrt(static_cast<double>(reps)) * std::log(2.0));
  const double c = std::log2(mean);
  return {c - half, c + half};
}

double fit_slope(std::span<const ExperimentRow> rows) {
  std::vector<double> xs;
  for (const auto& r : rows) {
    const double x = std::log2(static_cast<double>(r.n));
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  if (xs.size() < 3) throw ArgumentError("slope fit needs at least 3 distinct n values");
  double mx = 0.0, my = 0.0;
  for (const auto& r : rows) {
    if (!std::isfinite(r.log2_mean)) throw NumericalError("slope fit needs finite log2 means");
    mx += std::log2(static_cast<double>(r.n));
    my += r.log2_mean;
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : rows) {
    const double dx = std::log2(static_cast<double>(r.n)) - mx;
    sxy += dx * (r.log2_mean - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double fit_slope(const ExperimentResult& result, Estimator estimator) {
  std::vector<ExperimentRow> rows;
  for (const auto& r : result.rows)
    if (r.estimator == estimator) rows.push_back(r);
  return fit_slope(rows);
}

double contraction_radius(std::uint64_t n, double v, double radius_scale, double gamma) {
  const double nd = static_cast<double>(n);
  return radius_scale * std::pow(nd, -1.0 / (2.0 * v)) * std::pow(std::log(nd), gamma / v);
}

std::vector<double> posterior_contraction_mc(const GroundTruth& gt, double v, double p,
                                             std::span<const std::uint64_t> n_list, double radius_scale,
                                             std::size_t posterior_draws, std::size_t reps, Rng& rng) {
  if (gt.dim() != 1) throw ArgumentError("posterior contraction check needs a 1-D truth");
  if (!(radius_scale >= 0.0)) throw ArgumentError("radius_scale must be >= 0");
  if (posterior_draws < 1 || reps < 1) throw ArgumentError("posterior_draws and reps must be >= 1");
  ExperimentSpec spec;
  spec.gt = gt;
  spec.v = v;
  spec.p = p;
  const Truth truth(spec);
  ModelConfig model;
  model.d = 1;
  model.v = v;
  model.p = p;
  model.prior = AutoConstantPrior{};

  std::vector<double> out;
  for (std::uint64_t n : n_list) {
    if (n < 2) throw ArgumentError("posterior contraction needs n >= 2");
    const double radius = contraction_radius(n, v, radius_scale);
    std::size_t exceed = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto hist = fit_batch(sample(gt, rng, n), model);
      for (std::size_t k = 0; k < posterior_draws; ++k) {
        const auto w = sample_posterior(hist, rng);
        if (truth.to_quantile(quantile_of_weights(w)) > radius) ++exceed;
      }
    }
    out.push_back(static_cast<double>(exceed) / static_cast<double>(reps * posterior_draws));
  }
  return out;
}

std::string results_csv(const ExperimentResult& result) {
  std::string s = "estimator,n,mean_w,sd_w,log2_mean,ci_lo,ci_hi\n";
  for (const auto& r : result.rows) {
    s += std::string(estimator_name(r.estimator)) + "," + std::to_string(r.n) + "," + format_sig12(r.mean_w) + "," +
         format_sig12(r.sd_w) + "," + format_sig12(r.log2_mean) + "," + format_sig12(r.ci_lo) + "," +
         format_sig12(r.ci_hi) + "\n";
  }
  return s;
}

std::string results_json(const ExperimentResult& result) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"estimator", estimator_name(r.estimator)},
                    {"n", r.n},
                    {"mean_w", num(r.mean_w)},
                    {"sd_w", num(r.sd_w)},
                    {"log2_mean", num(r.log2_mean)},
                    {"ci_lo", num(r.ci_lo)},
                    {"ci_hi", num(r.ci_hi)}});
  }
  return nlohmann::json{{"rows", rows}}.dump(2) + "\n";
}

void set_spec_field(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (k == "gt") {
    spec.gt = parse_ground_truth(unquote(trim(value)));
  } else if (k == "v") {
    spec.v = parse_value<double>(key, value);
  } else if (k == "p") {
    spec.p = parse_value<double>(key, value);
  } else if (k == "estimators") {
    spec.estimators.clear();
    for (const auto& item : split_list(value)) spec.estimators.push_back(parse_estimator(item));
  } else if (k == "log2_n" || k == "log2_n_list") {
    spec.log2_n.clear();
    for (const auto& item : split_list(value)) spec.log2_n.push_back(parse_value<int>(key, item));
  } else if (k == "reps") {
    spec.reps = parse_value<int>(key, value);
  } else if (k == "seed") {
    spec.seed = parse_value<std::uint64_t>(key, value);
  } else if (k == "truth_m" || k == "truth_discretization_m") {
    spec.truth_m = parse_value<std::size_t>(key, value);
  } else if (k == "depth") {
    spec.depth = parse_value<int>(key, value);
  } else {
    throw ConfigError("unknown experiment key '" + k + "'");
  }
}

ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      set_spec_field(spec, trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return spec;
}

}  // namespace dyadic
