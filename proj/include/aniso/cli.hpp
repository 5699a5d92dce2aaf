#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aniso {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_inequality_failed = 1,
  exit_usage = 2,        // unparseable flags or config, empty catalog
  exit_not_converged = 3,
};

/// Entry point of the `aniso` tool; args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace aniso
