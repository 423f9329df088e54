#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace squidsim {

/// Command-line front end: spectrum | sweep | validate.
/// Exit codes: 0 success, 1 numerical/validation failure, 2 usage/config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace squidsim
