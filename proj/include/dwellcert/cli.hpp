#pragma once

// Command dispatch shared by the dwellcert executable and the tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace dwellcert {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 2,
    kExitParse = 3,
    kExitViolated = 4,
    kExitInfeasible = 5,
};

/// `args` excludes the program name. Reports go to `out` as JSON; diagnostics
/// go to `err` only on failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dwellcert
