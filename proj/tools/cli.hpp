#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctbn::cli {

/// Runs one command line (program name excluded) and returns its exit code:
/// 0 success, 1 domain violation, 2 I/O, parse or usage failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctbn::cli
