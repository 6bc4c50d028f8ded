#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpdc {

// Drives the command-line tool.  `args` are argv-style arguments without
// the program name.  Returns the process exit code: 0 on success, 1 on
// numerical or file failures, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpdc
