#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace agesvd::cli {

// Runs one invocation. argv[0] is the program name. Primary output goes to
// `out` unless --out names a file; diagnostics go to `err`. Returns the
// process exit code (0 ok, 1 usage, 2 data, 3 numerical).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agesvd::cli
