#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pia {

// args excludes the program name. Returns the process exit code:
// 0 ok, 2 input error, 3 evaluation error, 4 failed verification.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pia
