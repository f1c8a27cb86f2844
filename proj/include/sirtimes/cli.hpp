#pragma once

#include <ostream>

namespace sirtimes {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitChecksFailed = 1,
    kExitInvalidConfig = 2,
    kExitNumericFailure = 3,
    kExitNeverReached = 4,
    kExitRowFailures = 5,
};

// Entry point of the `sirtimes` tool; argv[0] is the program name.
// Results go to `out` unless --out names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sirtimes
