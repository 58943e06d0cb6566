#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace inkbridge::cli {

/// Runs one subcommand. args excludes the program name. Reports go to out
/// (or --out), warnings and errors to err. Exit codes: 0 success,
/// 1 input validation failure or usage error, 2 I/O failure, 3 numerical failure.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace inkbridge::cli
