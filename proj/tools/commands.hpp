#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nads::cli {

enum ExitCode { kOk = 0, kFailure = 1, kInvalidInput = 2, kBudgetExhausted = 3 };

// Runs the nads command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nads::cli
