#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace medlda::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Runs one command line (without the program name). Messages go to `out`
// and `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medlda::cli
