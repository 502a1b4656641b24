#pragma once

#include <iosfwd>

namespace esmap::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kInfeasible = 3,
  kNoConvergence = 4,
};

/// Parses argv, dispatches one subcommand and writes its artifact to `out`
/// (or to --out PATH). Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace esmap::cli
