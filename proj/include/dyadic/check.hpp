#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/discrete_measure.hpp"

namespace dyadic {

using OtSolver = std::function<double(const DiscreteMeasure&, const DiscreteMeasure&, double v, double p)>;

struct CheckOptions {
  std::uint64_t seed = 20240601;
  /// Solver checked by the `ot` suite; defaults to ot_discrete.
  OtSolver ot;
};

struct SuiteReport {
  std::string name;
  bool pass = false;
  /// Smallest slack between the observed statistic and its allowed limit
  /// (negative on failure).
  double margin = 0.0;
  std::string detail;
};

/// multinomial, dirichlet, haar, ot.
const std::vector<std::string>& check_suite_names();

/// Throws ArgumentError for an unknown suite name.
SuiteReport run_check_suite(std::string_view name, const CheckOptions& options = {});

}  // namespace dyadic
