#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vcsp {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitTractable = 0,
    kExitError = 1,
    kExitNpHard = 2,
    kExitGeneral = 3,
    kExitInfeasible = 4,
    kExitNoWitness = 5,
};

/// Runs the tool on `args` (without the program name). Configuration
/// flags fall back to VCSP_* environment variables.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vcsp
