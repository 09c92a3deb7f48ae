#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace camforge {

/// Runs one command line (without the program name). Returns 0 on success,
/// 2 on usage errors and 1 when reading the model or generating fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace camforge
