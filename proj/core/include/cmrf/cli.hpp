#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cmrf {

// Dispatches one CLI invocation (without the program name). Returns the
// process exit code: 0 success, 1 check failure, 2 input error, 3 guard
// exceeded.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cmrf
