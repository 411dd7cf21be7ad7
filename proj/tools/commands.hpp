#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kirchhoff::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kInvalid = 2,
    kNoConvergence = 3,
    kCollision = 4,
    kAliasing = 5,
};

/// Parses args (args[0] is the program name), runs one subcommand and returns
/// its exit code. Reports go to `out` unless --quiet; diagnostics go to `err`.
/// Files are written under --out only after the computation has finished.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace kirchhoff::cli
