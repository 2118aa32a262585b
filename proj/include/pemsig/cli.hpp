#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pemsig {

// Entry point behind the pemsig binary, separated for in-process testing.
// `args` excludes the program name. Returns 0 on success, 1 on usage
// errors, 2 on data errors; diagnostics go to `err`.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pemsig
