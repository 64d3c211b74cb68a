#pragma once

#include <string>
#include <vector>

namespace senscore {

// Entry point shared by the binary and the CLI tests. Returns the process
// exit code: 0 success, 2 input error, 3 capability error.
int run_cli(const std::vector<std::string>& args);

}  // namespace senscore
