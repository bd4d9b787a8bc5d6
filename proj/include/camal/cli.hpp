#pragma once

#include <string>
#include <vector>

namespace camal {

// Runs one subcommand with argv-style arguments (program name excluded) and
// returns the process exit code: 0 all checks passed, 2 inconclusive outcome
// present, 1 invariant violation or runtime error, 64 configuration error.
int run_cli(const std::vector<std::string>& args);

}  // namespace camal
