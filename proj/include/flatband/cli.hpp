#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flatband {

// Exit codes: 0 = all verdicts pass, 1 = a check failed, 2 = usage or
// validity error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace flatband
