#pragma once

#include <ostream>

namespace genepy::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kDegeneratePanel = 2,
  kNotConverged = 3,
};

/// Runs `genepy <compute|compare|validate> ...` with argv[0] being the program
/// name. Human-readable output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace genepy::cli
