#pragma once

#include <iosfwd>

namespace gencd::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kBadFlags = 2,
  kIoError = 3,
  kParseError = 4,
  kDiverged = 5,
};

/// Entry point behind the `gencd` binary. Subcommands: solve, color-stats,
/// spectral, convert.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gencd::cli
