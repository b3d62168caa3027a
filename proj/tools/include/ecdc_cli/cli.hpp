#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecdc::cli {

/// Exit codes of run().
enum ExitCode : int { kOk = 0, kValidationFailure = 1, kNumericalFailure = 2 };

/// Executes one subcommand. Results go to `out` (or the file named by --out),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Column header of the sweep CSV for the swept parameter name.
std::vector<std::string> sweep_columns(const std::string& param);

} // namespace ecdc::cli
