#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curverec {

// Runs one CLI invocation (without the program name). Returns the process
// exit code: 0 ok, 1 input/parse error, 2 numeric error, 3 no equilibrium,
// 64 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curverec
