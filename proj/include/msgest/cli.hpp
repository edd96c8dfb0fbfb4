#pragma once

#include <string>
#include <vector>

namespace msgest {

/// Runs one command line (args[0] is the program name) and returns the exit
/// code: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
/// Messages go to standard error.
int run_cli(const std::vector<std::string>& args);

} // namespace msgest
