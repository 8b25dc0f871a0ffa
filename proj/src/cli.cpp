#include "dyadic/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "dyadic/check.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/histogram.hpp"
#include "dyadic/io.hpp"
#include "dyadic/quantile.hpp"
#include "dyadic/simulate.hpp"
#include "dyadic/streaming.hpp"
#include "dyadic/transport.hpp"
#include "dyadic/wasserstein.hpp"

namespace dyadic::cli {

namespace {

PriorSpec parse_prior(const std::string& text) {
  if (text == "zero") return ZeroPrior{};
  if (text == "auto") return AutoConstantPrior{};
  if (text.rfind("const:", 0) == 0) {
    const std::string num = text.substr(6);
    double c = 0.0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), c);
    if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size() || !(c >= 0.0))
      throw ArgumentError("invalid constant prior '" + text + "'");
    return ConstantPrior{c};
  }
  throw ArgumentError("prior must be zero, auto or const:c (got '" + text + "')");
}

// Opens a file, or wraps `in` for "-".
class Input {
 public:
  Input(const std::string& path, std::istream& in) {
    if (path == "-") {
      buffer_ << in.rdbuf();
      stream_ = &buffer_;
    } else {
      file_.open(path);
      if (!file_) throw ArgumentError("cannot open '" + path + "'");
      stream_ = &file_;
    }
  }
  std::istream& get() { return *stream_; }
  void rewind() {
    stream_->clear();
    stream_->seekg(0);
  }

 private:
  std::ifstream file_;
  std::stringstream buffer_;
  std::istream* stream_ = nullptr;
};

enum class InputKind { Points, Histogram };

InputKind detect_kind(const std::string& path, const std::string& as) {
  if (as == "csv") return InputKind::Points;
  if (as == "json") return InputKind::Histogram;
  if (!as.empty()) throw ArgumentError("--as must be csv or json");
  auto ends_with = [&](const char* ext) {
    const std::string e(ext);
    return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
  };
  if (ends_with(".json")) return InputKind::Histogram;
  if (ends_with(".csv") || path == "-") return InputKind::Points;
  throw ArgumentError("cannot tell the kind of '" + path + "' from its extension; pass --as csv|json");
}

// A loaded dist operand: either a histogram or a point cloud.
struct Operand {
  std::optional<DyadicHistogram> hist;
  std::optional<DiscreteMeasure> points;

  int dim() const { return hist ? hist->dim() : points->dim(); }
  DiscreteMeasure discrete() const { return hist ? discretize(*hist) : *points; }
  PiecewiseQuantile quantile() const { return hist ? quantile_of_histogram(*hist) : quantile_of_discrete(*points); }
  std::unique_ptr<DyadicMassOracle> oracle() const {
    if (hist) return std::make_unique<HistogramMassOracle>(*hist);
    return std::make_unique<DiscreteMassOracle>(*points);
  }
};

Operand load_operand(const std::string& path, const std::string& as, std::istream& in) {
  Input input(path, in);
  Operand op;
  if (detect_kind(path, as) == InputKind::Histogram) {
    std::stringstream ss;
    ss << input.get().rdbuf();
    op.hist = histogram_from_json(ss.str());
  } else {
    auto pts = read_points_csv(input.get());
    if (pts.empty()) throw DomainError("'" + path + "' holds no points");
    op.points = DiscreteMeasure::empirical(pts);
  }
  return op;
}

struct FitArgs {
  std::string in;
  int d = 1;
  double v = 1.0;
  double p = 1.0;
  std::optional<int> depth;
  std::string prior = "auto";
};

void warn_budget(const DyadicHistogram& h, double v, std::ostream& err) {
  if (prior_exceeds_budget(h.total_prior(), h.sample_count(), h.dim(), v))
    err << "warning: total prior mass " << h.total_prior()
        << " exceeds the admissible budget; the prior may dominate the data\n";
}

int cmd_fit(const FitArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  ModelConfig cfg;
  cfg.d = a.d;
  cfg.v = a.v;
  cfg.p = a.p;
  if (a.depth) cfg.depth = ExplicitDepth{*a.depth};
  cfg.prior = parse_prior(a.prior);
  cfg.validate();

  Input input(a.in, in);
  // Pass 1: sample size, needed by the depth rule and the prior.
  const std::uint64_t n = count_csv_rows(input.get());
  input.rewind();
  const int K = resolve_depth(cfg, n);
  if (static_cast<long long>(K) * cfg.d > 24) throw CapacityError("depth too large for a dense histogram");
  CellCounts counts(std::uint64_t{1} << (K * cfg.d));
  // Pass 2: bin.
  std::string line;
  std::vector<double> row;
  std::uint64_t lineno = 0;
  while (std::getline(input.get(), line)) {
    ++lineno;
    try {
      if (!parse_point_row(line, cfg.d, row)) continue;
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    }
    counts.add(bin_flat(row, K));
  }
  const std::uint64_t cells = counts.cells();
  DyadicHistogram hist(cfg.d, K, std::move(counts), resolve_prior(cfg.prior, n, cfg.d, cfg.v, cells));
  warn_budget(hist, cfg.v, err);
  out << histogram_to_json(hist) << "\n";
  return kExitOk;
}

struct StreamArgs {
  std::string in = "-";
  int d = 1;
  double v = 1.0;
  double p = 1.0;
  std::uint64_t M = 0;
  std::uint64_t every = 0;
  std::string prior = "auto";
};

void emit_snapshot(const MultiResCounter& c, std::ostream& out) {
  out << histogram_to_json(c.current_estimate()) << "\n";
}

int cmd_stream(const StreamArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  StreamConfig cfg;
  cfg.M = a.M;
  cfg.d = a.d;
  cfg.v = a.v;
  cfg.p = a.p;
  cfg.prior = parse_prior(a.prior);
  MultiResCounter counter(cfg);
  Input input(a.in, in);
  std::string line;
  std::vector<double> row;
  std::uint64_t lineno = 0;
  bool warned = false;
  while (std::getline(input.get(), line)) {
    ++lineno;
    try {
      if (!parse_point_row(line, cfg.d, row)) continue;
      counter.push(row);
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (counter.cap_exceeded() && !warned) {
      err << "warning: stream longer than M = " << cfg.M << "; depth stays at " << counter.finest_depth() << "\n";
      warned = true;
    }
    if (a.every > 0 && counter.points_seen() % a.every == 0) emit_snapshot(counter, out);
  }
  if (counter.points_seen() == 0) {
    err << "stream: no points read\n";
    return kExitOk;
  }
  if (a.every == 0 || counter.points_seen() % a.every != 0) emit_snapshot(counter, out);
  return kExitOk;
}

struct DistArgs {
  std::string a, b;
  std::string as;
  double v = 1.0;
  double p = 1.0;
  bool exact_1d = false;
  bool ot = false;
  std::optional<int> bound;
};

int cmd_dist(const DistArgs& a, std::istream& in, std::ostream& out) {
  const int modes = int(a.exact_1d) + int(a.ot) + int(a.bound.has_value());
  if (modes != 1) throw ArgumentError("choose exactly one of --exact-1d, --ot, --bound K");
  if (!(a.v >= 1.0)) throw ArgumentError("--v must be >= 1");
  if (!(a.p >= 1.0)) throw ArgumentError("--p must be >= 1");
  const Operand x = load_operand(a.a, a.as, in);
  const Operand y = load_operand(a.b, a.as, in);
  if (x.dim() != y.dim())
    throw DomainError("dimension mismatch: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  double value = 0.0;
  if (a.exact_1d) {
    if (x.dim() != 1) throw ArgumentError("--exact-1d needs 1-D inputs");
    value = wasserstein_1d(x.quantile(), y.quantile(), a.v);
  } else if (a.ot) {
    value = ot_discrete(x.discrete(), y.discrete(), a.v, a.p);
  } else {
    value = multires_bound(*x.oracle(), *y.oracle(), *a.bound, a.v, a.p);
  }
  out << format_fixed12(value) << "\n";
  return kExitOk;
}

struct SimArgs {
  std::string spec_file;
  std::optional<std::string> gt;
  std::optional<double> v, p;
  std::optional<std::string> estimators;
  std::optional<std::string> log2_n;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> truth_m;
  std::optional<int> depth;
  unsigned threads = 1;
  bool json = false;
};

int cmd_simulate(const SimArgs& a, std::istream& in, std::ostream& out) {
  ExperimentSpec spec;
  if (!a.spec_file.empty()) {
    Input input(a.spec_file, in);
    spec = parse_experiment_spec(input.get());
  }
  auto num = [](auto x) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(17);
    s << x;
    return s.str();
  };
  if (a.gt) set_spec_field(spec, "gt", *a.gt);
  if (a.v) set_spec_field(spec, "v", num(*a.v));
  if (a.p) set_spec_field(spec, "p", num(*a.p));
  if (a.estimators) set_spec_field(spec, "estimators", *a.estimators);
  if (a.log2_n) set_spec_field(spec, "log2_n", *a.log2_n);
  if (a.reps) spec.reps = *a.reps;
  if (a.seed) spec.seed = *a.seed;
  if (a.truth_m) spec.truth_m = *a.truth_m;
  if (a.depth) spec.depth = *a.depth;
  if (spec.gt.dim() >= 2 && !spec.truth_m) spec.truth_m = 1000;
  if (a.threads < 1) throw ArgumentError("--threads must be >= 1");
  const auto result = run_experiment(spec, a.threads);
  out << (a.json ? results_json(result) : results_csv(result));
  return kExitOk;
}

struct CheckArgs {
  std::vector<std::string> suites;
  std::optional<std::uint64_t> seed;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  CheckOptions opt;
  if (a.seed) opt.seed = *a.seed;
  const auto& names = a.suites.empty() ? check_suite_names() : a.suites;
  bool all = true;
  for (const auto& name : names) {
    const auto r = run_check_suite(name, opt);
    all = all && r.pass;
    char margin[64];
    std::snprintf(margin, sizeof margin, "%.6g", r.margin);
    out << (r.pass ? "PASS " : "FAIL ") << r.name << " margin=" << margin << " " << r.detail << "\n";
  }
  return all ? kExitOk : kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dyadic histogram density estimation with Wasserstein error tools", "dyadic"};
  app.set_version_flag("--version", std::string("dyadic ") + kToolVersion + " (histogram format " +
                                        std::to_string(kHistogramFormatVersion) + ")");
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a dyadic histogram to a points CSV (two passes)");
  fit_cmd->add_option("--in", fit.in, "Points CSV, or - for stdin")->required();
  fit_cmd->add_option("--d", fit.d, "Dimension")->required();
  fit_cmd->add_option("--v", fit.v, "Wasserstein order")->required();
  fit_cmd->add_option("--p", fit.p, "Ground norm order");
  fit_cmd->add_option("--depth", fit.depth, "Explicit depth K");
  fit_cmd->add_option("--prior", fit.prior, "zero | const:c | auto");

  StreamArgs st;
  auto* st_cmd = app.add_subcommand("stream", "Feed points one at a time and print histogram snapshots");
  st_cmd->add_option("--in", st.in, "Points CSV (default: stdin)");
  st_cmd->add_option("--d", st.d, "Dimension")->required();
  st_cmd->add_option("--v", st.v, "Wasserstein order")->required();
  st_cmd->add_option("--p", st.p, "Ground norm order");
  st_cmd->add_option("--cap,--M", st.M, "Conservative upper bound M on the stream length")->required();
  st_cmd->add_option("--emit-every,--every", st.every, "Snapshot every k points (0: final snapshot only)");
  st_cmd->add_option("--prior", st.prior, "zero | const:c | auto");

  DistArgs di;
  auto* di_cmd = app.add_subcommand("dist", "Wasserstein distance between two inputs (.csv points or .json histogram)");
  di_cmd->add_option("a,--a", di.a, "First input")->required();
  di_cmd->add_option("b,--b", di.b, "Second input")->required();
  di_cmd->add_option("--v", di.v, "Wasserstein order")->required();
  di_cmd->add_option("--p", di.p, "Ground norm order");
  di_cmd->add_option("--as", di.as, "Treat both inputs as csv or json");
  di_cmd->add_flag("--exact-1d", di.exact_1d, "Exact 1-D quantile formula");
  di_cmd->add_flag("--discrete,--ot", di.ot, "Discrete optimal transport (histograms collapsed to cell centers)");
  di_cmd->add_option("--bound", di.bound, "Multiresolution upper bound at depth K");

  SimArgs si;
  auto* si_cmd = app.add_subcommand("simulate", "Monte-Carlo error curves; CSV on stdout");
  si_cmd->add_option("--spec", si.spec_file, "key = value experiment file");
  si_cmd->add_option("--gt", si.gt, "uniform:d | beta:x | split:a,e | product:s1|s2");
  si_cmd->add_option("--v", si.v, "Wasserstein order");
  si_cmd->add_option("--p", si.p, "Ground norm order");
  si_cmd->add_option("--estimators", si.estimators, "Comma-separated estimator names");
  si_cmd->add_option("--log2-n", si.log2_n, "Comma-separated log2 sample sizes");
  si_cmd->add_option("--reps", si.reps, "Replicates per sample size");
  si_cmd->add_option("--seed", si.seed, "Seed");
  si_cmd->add_option("--truth-m", si.truth_m, "Truth discretization size for d >= 2 (default 1000)");
  si_cmd->add_option("--depth", si.depth, "Histogram depth override");
  si_cmd->add_option("--threads", si.threads, "Worker threads");
  si_cmd->add_flag("--json", si.json, "JSON instead of CSV");

  CheckArgs ch;
  auto* ch_cmd = app.add_subcommand("check", "Run the built-in property suites");
  ch_cmd->add_option("--suite", ch.suites, "multinomial | dirichlet | haar | ot (repeatable)");
  ch_cmd->add_option("--seed", ch.seed, "Seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit, in, out, err);
    if (st_cmd->parsed()) return cmd_stream(st, in, out, err);
    if (di_cmd->parsed()) return cmd_dist(di, in, out);
    if (si_cmd->parsed()) return cmd_simulate(si, in, out);
    if (ch_cmd->parsed()) return cmd_check(ch, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace dyadic::cli
