#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msdn::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericError = 4 };

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msdn::cli
