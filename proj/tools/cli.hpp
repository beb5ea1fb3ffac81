#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bayrn::tools {

/// Exit codes of the command line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Runs the command line tool on `args` (without the program name).
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bayrn::tools
