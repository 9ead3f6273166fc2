#pragma once

#include <ostream>

namespace cglwaves::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

// Parses argv and runs one command. Results go to `out` unless --output is
// given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cglwaves::cli
