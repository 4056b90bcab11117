#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcheck {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitSolver = 3, kExitUsage = 4 };

// Runs the qcheck command line; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcheck
