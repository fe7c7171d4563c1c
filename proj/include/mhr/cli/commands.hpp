#pragma once

// Entry points of the `mhr` command-line tool.
//
// Exit codes: 0 success, 2 invalid input or usage, 3 statistically degenerate
// data (for example an arm without events before the truncation time).

#include <ostream>
#include <string>
#include <vector>

namespace mhr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDegenerate = 3;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace mhr::cli
