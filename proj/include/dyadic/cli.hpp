#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dyadic::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`; `in` backs the `-` file name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace dyadic::cli
