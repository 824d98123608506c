#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mnet::cli {

// Exit codes shared by every command.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // semantic error or law violation
inline constexpr int kUsage = 2;    // bad arguments or unreadable files

// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mnet::cli
