#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace circuflow::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitInvalid = 2,  // load, schema or validation failure
    kExitNumeric = 3,
};

/// Runs one `circuflow` invocation. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace circuflow::cli
