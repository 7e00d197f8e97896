#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poolmax::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kData = 3,
    kDegenerate = 4,
};

/// Runs one command line. `args` excludes the program name. Results go to
/// --out when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poolmax::cli
