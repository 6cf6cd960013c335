#ifndef GAPMODE_CLI_HPP
#define GAPMODE_CLI_HPP

#include <string>
#include <vector>

namespace gapmode {

/// Dispatches one gapmode subcommand. `args` excludes the program name.
/// Exit codes: 0 success (including a no-crossing outcome), 1 structured
/// math-path errors, 2 configuration/usage errors.
int run_command(const std::vector<std::string>& args);

}  // namespace gapmode

#endif
