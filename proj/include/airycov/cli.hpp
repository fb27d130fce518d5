#pragma once

// Command-line front end. run() is the whole program minus process exit, so
// tests can drive it in-process.
//
// Subcommands: cov, joint, dyson, figure, selftest. Exit codes: 0 success,
// 1 numerical or self-test failure, 2 argument error.

#include <iosfwd>
#include <string>
#include <vector>

namespace airycov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle checks for quadrature, Airy function, kernel identity, Fredholm
/// engine and eigensolver.
std::vector<SelfTestResult> run_selftest();

/// 17 significant digits; "nan" for NaN.
std::string format_number(double v);

/// Runs the CLI on args (without the program name). Regular output goes to
/// `out`, diagnostics and the run manifest line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace airycov::cli
