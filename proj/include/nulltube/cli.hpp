#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nulltube {

/// Exit codes: 0 ok, 2 configuration, 3 domain, 4 solver, 5 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nulltube
