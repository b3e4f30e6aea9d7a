#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prony::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitConvergence = 3,
  kExitRankAnomaly = 4,
};

/// Runs the command line given without the program name, e.g.
/// {"recover", "--grid", "g.bin"}. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prony::cli
