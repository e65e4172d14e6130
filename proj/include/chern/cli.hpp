#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chern {

/// Entry point for the chernlab command line. JSON Lines rows go to `out`,
/// the human-readable summary to `err`. Returns the process exit code:
/// 0 = all checks pass, 1 = at least one residual/verdict failure,
/// 2 = usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chern
