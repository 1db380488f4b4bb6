#pragma once

#include <string>
#include <vector>

namespace pshoot {

/// Command-line entry point (args exclude the program name).
/// Exit codes: 0 success, 2 config/usage error, 3 solver failure,
/// 4 no solution found under --require-solution.
int cli_run(const std::vector<std::string>& args);

}  // namespace pshoot
