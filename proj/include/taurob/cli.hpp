#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taurob::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidConfig = 1,
  kValidationFailure = 2,
  kSolverInfeasible = 3,
};

// Runs one CLI invocation. args excludes the program name. Reports go to
// --output (written atomically) or to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Worker count for sweeps: TAUROB_THREADS if set and positive, else the
// hardware concurrency.
unsigned thread_budget();

}  // namespace taurob::cli
