// cli.hpp — Entry point of the memkernel command-line tool

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace memkernel::cli {

// args excludes the program name. Returns the process exit status: 0 on success,
// nonzero for flag/config errors or numerical failures. Physics verdicts
// (unphysical regimes, failed positivity) are reported as data with status 0.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace memkernel::cli
