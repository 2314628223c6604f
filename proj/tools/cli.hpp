#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chainscape::cli {

// Runs one command line (args excludes the program name). Returns the exit
// code: 0 success, 1 analysis failure, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chainscape::cli
