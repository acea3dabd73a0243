#pragma once

#include <string>
#include <vector>

namespace foodsig {

// Runs one CLI invocation (args exclude the program name).
// Exit codes: 0 ok, 2 config error, 3 data error, 4 internal error.
int run_cli(const std::vector<std::string>& args);

}  // namespace foodsig
