// Subcommand front end: simulate, verify <suite>, export-plotdata.
#pragma once

#include <string>
#include <vector>

namespace sscl::cli {

// Exit codes: 0 success, 1 config/precondition error, 2 path abort,
// 3 suite failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace sscl::cli
