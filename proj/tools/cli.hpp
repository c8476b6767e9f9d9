#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgkex::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 success, 1 domain error or failed check, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgkex::cli
