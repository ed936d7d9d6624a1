#pragma once

// Command-line front end: pointset, design, certify, project, sweep,
// denoise and bank-check subcommands.

#include <string>
#include <vector>

namespace sphd {

enum ExitCode : int {
  exit_ok = 0,
  exit_io = 1,
  exit_not_converged = 2,
  exit_certification = 3,
  exit_config = 4,
};

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace sphd
