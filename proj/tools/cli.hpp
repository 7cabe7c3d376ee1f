#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace coulomb::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,    ///< verify-all ran but some check failed
    kExitInvalidConfig = 2,  ///< bad flag, value or precondition
    kExitNonConvergence = 3,
    kExitIoError = 4,
};

/// Runs one `coulomb` invocation. `args` excludes the program name. The
/// report goes to `out` unless --output names a file; usage text and error
/// messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Decimal or fraction ("1/12").
double parse_number(std::string_view text);

/// Comma-separated parse_number values; empty items are rejected.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace coulomb::cli
