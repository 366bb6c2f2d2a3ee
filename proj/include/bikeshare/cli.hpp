#pragma once

#include <iosfwd>

namespace bikeshare {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitChecksFailed = 1,
    kExitUsage = 2,
    kExitParse = 3,
    kExitDomain = 4,
    kExitInternal = 5,
};

/// Entry point shared by the executable and the tests. Errors are reported as
/// a one-line JSON object on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bikeshare
