#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "dyadic/check.hpp"
#include "dyadic/cli.hpp"
#include "dyadic/io.hpp"
#include "dyadic/transport.hpp"

using namespace dyadic;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("dyadic_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("fit examples") {
  const auto csv = write_file("four.csv", "0.1\n0.3\n0.6\n0.9\n");
  auto r = run({"fit", "--in", csv, "--d", "1", "--v", "1", "--prior", "zero"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["K"] == 1);
  CHECK(j["counts"] == nlohmann::json::array({2, 2}));
  CHECK(j["format_version"] == 1);

  auto e = run({"fit", "--in", write_file("empty.csv", ""), "--d", "1", "--v", "1"});
  REQUIRE(e.code == 0);
  auto je = nlohmann::json::parse(e.out);
  CHECK(je["K"] == 0);
  CHECK(je["counts"] == nlohmann::json::array({0}));

  auto bad = run({"fit", "--in", write_file("bad.csv", "0.2\n1.5\n"), "--d", "1", "--v", "1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);

  auto via_stdin = run({"fit", "--in", "-", "--d", "1", "--v", "1", "--prior", "zero"}, "0.1\n0.3\n0.6\n0.9\n");
  CHECK(via_stdin.out == r.out);
}

TEST_CASE("fit flags") {
  const auto csv = write_file("flags.csv", "0.1\n0.3\n");
  CHECK(run({"fit", "--in", csv, "--d", "1", "--v", "1", "--bogus"}).code == 1);
  CHECK(run({"fit", "--in", csv, "--d", "1"}).code == 1);
  CHECK(run({"fit", "--in", csv, "--d", "1", "--v", "1", "--prior", "const:-2"}).code == 1);
  auto deep = run({"fit", "--in", csv, "--d", "1", "--v", "1", "--depth", "3", "--prior", "const:0.5"});
  REQUIRE(deep.code == 0);
  auto h = histogram_from_json(deep.out);
  CHECK(h.depth() == 3);
  CHECK(h.total_prior() == doctest::Approx(4.0));
}

TEST_CASE("dist examples") {
  const auto csv = write_file("pts.csv", "0.1\n0.3\n0.6\n0.95\n");
  auto same = run({"dist", csv, csv, "--v", "1", "--exact-1d"});
  REQUIRE(same.code == 0);
  CHECK(same.out == "0.000000000000\n");

  const auto left = write_file("left.json", R"({"format_version":1,"d":1,"K":1,"n":1,"counts":[1,0],"prior":0})");
  const auto right = write_file("right.json", R"({"format_version":1,"d":1,"K":1,"n":1,"counts":[0,1],"prior":0})");
  auto half = run({"dist", "--a", left, "--b", right, "--v", "1", "--exact-1d"});
  REQUIRE(half.code == 0);
  CHECK(std::stod(half.out) == doctest::Approx(0.5).epsilon(1e-12));

  auto exact = run({"dist", csv, left, "--v", "2", "--exact-1d"});
  auto bound = run({"dist", csv, left, "--v", "2", "--bound", "5"});
  REQUIRE(exact.code == 0);
  REQUIRE(bound.code == 0);
  CHECK(std::stod(bound.out) >= std::stod(exact.out));

  auto ot = run({"dist", csv, left, "--v", "2", "--discrete"});
  REQUIRE(ot.code == 0);

  const auto two = write_file("two.csv", "0.1,0.2\n0.5,0.5\n");
  CHECK(run({"dist", csv, two, "--v", "1", "--discrete"}).code == 2);
  CHECK(run({"dist", csv, csv, "--v", "1"}).code == 1);
  CHECK(run({"dist", csv, csv, "--v", "1", "--exact-1d", "--discrete"}).code == 1);
}

TEST_CASE("fit output round-trips through dist") {
  const auto csv = write_file("round.csv", "0.05\n0.2\n0.21\n0.7\n0.99\n0.5\n");
  auto fit = run({"fit", "--in", csv, "--d", "1", "--v", "1", "--prior", "const:0.3"});
  REQUIRE(fit.code == 0);
  const auto json = write_file("round.json", fit.out);
  auto h = histogram_from_json(fit.out);
  CHECK(histogram_to_json(h) + "\n" == fit.out);
  auto self = run({"dist", json, json, "--v", "2", "--exact-1d"});
  REQUIRE(self.code == 0);
  CHECK(self.out == "0.000000000000\n");
}

TEST_CASE("stream emits snapshots") {
  std::string pts;
  for (int i = 0; i < 10; ++i) pts += std::to_string((i + 0.5) / 10) + "\n";
  auto r = run({"stream", "--cap", "16", "--d", "1", "--v", "1", "--emit-every", "4", "--prior", "zero"}, pts);
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::vector<nlohmann::json> snaps;
  for (std::string line; std::getline(lines, line);) snaps.push_back(nlohmann::json::parse(line));
  REQUIRE(snaps.size() == 3);
  CHECK(snaps[0]["n"] == 4);
  CHECK(snaps[0]["K"] == 1);
  CHECK(snaps[1]["n"] == 8);
  CHECK(snaps[2]["n"] == 10);
  CHECK(snaps[2]["K"] == 2);

  auto over = run({"stream", "--cap", "2", "--d", "1", "--v", "1"}, "0.1\n0.2\n0.3\n");
  CHECK(over.code == 0);
  CHECK(over.err.find("M = 2") != std::string::npos);
  CHECK(run({"stream", "--cap", "2", "--d", "1", "--v", "1"}, "0.1\nfoo\n").code == 2);
}

TEST_CASE("simulate") {
  auto a = run({"simulate", "--gt", "beta:1", "--v", "1", "--estimators", "empirical,hist_default_prior", "--log2-n",
                "2,4,6", "--reps", "4", "--seed", "9", "--threads", "1"});
  REQUIRE(a.code == 0);
  auto b = run({"simulate", "--gt", "beta:1", "--v", "1", "--estimators", "empirical,hist_default_prior", "--log2-n",
                "2,4,6", "--reps", "4", "--seed", "9", "--threads", "8"});
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 7);

  const auto spec = write_file("sim1.toml",
                               "gt = beta:1\nv = 1\nestimators = [empirical, hist_default_prior]\n"
                               "log2_n = [2, 4, 6, 8, 10, 12]\nreps = 2\nseed = 3\n");
  auto s = run({"simulate", "--spec", spec});
  REQUIRE(s.code == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 13);

  CHECK(run({"simulate", "--gt", "beta:1", "--v", "1", "--reps", "1"}).code == 1);
  CHECK(run({"simulate", "--gt", "nope", "--v", "1"}).code == 1);
  auto j = run({"simulate", "--gt", "uniform:1", "--v", "1", "--log2-n", "2,3,4", "--reps", "2", "--json"});
  REQUIRE(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).is_object());
}

TEST_CASE("check suites") {
  auto one = run({"check", "--suite", "haar"});
  CHECK(one.code == 0);
  CHECK(one.out.find("haar") != std::string::npos);
  CHECK(one.out.find("multinomial") == std::string::npos);
  CHECK(run({"check", "--suite", "nope"}).code == 1);
}

TEST_CASE("mutated simplex fails the ot suite") {
  CheckOptions good;
  CHECK(run_check_suite("ot", good).pass);

  CheckOptions flipped;
  flipped.ot = [](const DiscreteMeasure& mu, const DiscreteMeasure& nu, double v, double p) {
    std::vector<double> cost;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j) cost.push_back(-ground_cost(mu.atom(i), nu.atom(j), v, p));
    const auto r = solve_transport(mu.weights(), nu.weights(), cost);
    return std::pow(std::abs(r.cost), 1.0 / v);
  };
  auto report = run_check_suite("ot", flipped);
  CHECK_FALSE(report.pass);
  CHECK(report.margin < 0.0);
}

TEST_CASE("version") {
  auto r = run({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out.find("format 1") != std::string::npos);
}
