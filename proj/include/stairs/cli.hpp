#pragma once

#include <string>
#include <vector>

namespace stairs {

// Runs one CLI invocation. args excludes the program name. Returns the
// process exit status: 0 success, 1 usage error, 2 data or validation
// error. Diagnostics go to the error stream.
int run_cli(const std::vector<std::string>& args);

} // namespace stairs
