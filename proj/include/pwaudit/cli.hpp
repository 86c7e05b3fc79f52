#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pwaudit {

// Exit codes: 0 clean, 1 findings at or above the threshold (or not
// installable), 2 input error, 3 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pwaudit
