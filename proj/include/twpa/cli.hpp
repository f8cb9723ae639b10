#pragma once

#include <iosfwd>

namespace twpa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
};

// Entry point of the `twpa` tool. Results go to files under --out; `out`
// receives short summaries, `err` receives diagnostics.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twpa::cli
