#pragma once

#include <iosfwd>

namespace nspbound::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kViolated = 3,
  kIo = 4,
};

/// Entry point for the `nspbound` command (bound, curve, compare, mc, fit).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nspbound::cli
