#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyadic/distributions.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

enum class Estimator { Empirical, HistZeroPrior, HistDefaultPrior, HistDiscretized };

std::string_view estimator_name(Estimator e);
/// Throws ConfigError for an unknown name.
Estimator parse_estimator(std::string_view name);

struct ExperimentSpec {
  GroundTruth gt = GroundTruth::uniform(1);
  double v = 1.0;
  double p = 1.0;
  std::vector<Estimator> estimators{Estimator::HistDefaultPrior};
  std::vector<int> log2_n{2, 4, 6, 8, 10, 12};
  int reps = 100;
  std::uint64_t seed = 1;
  /// Size of the empirical stand-in for the truth when d >= 2.
  std::optional<std::size_t> truth_m;
  /// Histogram depth used instead of the automatic rule.
  std::optional<int> depth;

  /// Throws ConfigError on reps < 2, unsorted or repeated log2_n, a missing
  /// truth_m for d >= 2, or sizes beyond the transport cap.
  void validate() const;
};

struct ExperimentRow {
  Estimator estimator = Estimator::Empirical;
  std::uint64_t n = 0;
  double mean_w = 0.0;
  double sd_w = 0.0;
  double log2_mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // sorted by (estimator, n)
  bool operator==(const ExperimentResult&) const;
};

/// Monte-Carlo mean and sd of W_v(estimate, truth) for every (estimator, n).
/// Replicates run on `threads` workers; each draws from
/// Rng::derive(seed, {estimator, n, rep}), so thread count never changes values.
ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

/// 0.975 normal quantile.
inline constexpr double kZ975 = 1.959963984540054;

/// Delta-method interval for log2(mean): log2(mean) -/+ z sd / (mean sqrt(reps) ln 2).
std::pair<double, double> delta_ci(double mean, double sd, int reps, double level = 0.95);

/// OLS slope of log2_mean against log2(n).
double fit_slope(std::span<const ExperimentRow> rows);
double fit_slope(const ExperimentResult& result, Estimator estimator);

/// radius_scale * n^{-1/2v} * (ln n)^{gamma/v}.
double contraction_radius(std::uint64_t n, double v, double radius_scale, double gamma = 1.01);

/// For each n: fraction of (rep, posterior draw) pairs whose W_v to the truth
/// exceeds contraction_radius(n, v, radius_scale). 1-D truths only.
std::vector<double> posterior_contraction_mc(const GroundTruth& gt, double v, double p,
                                             std::span<const std::uint64_t> n_list, double radius_scale,
                                             std::size_t posterior_draws, std::size_t reps, Rng& rng);

/// CSV with header estimator,n,mean_w,sd_w,log2_mean,ci_lo,ci_hi (12 significant digits).
std::string results_csv(const ExperimentResult& result);
std::string results_json(const ExperimentResult& result);

/// `key = value` lines (TOML subset): gt, v, p, estimators, log2_n, reps,
/// seed, truth_m, depth. `#` starts a comment. Throws ConfigError.
ExperimentSpec parse_experiment_spec(std::istream& in);
/// Applies one key/value pair to `spec`.
void set_spec_field(ExperimentSpec& spec, std::string_view key, std::string_view value);

}  // namespace dyadic
