#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lookahead::cli {

inline constexpr const char* kEngineVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

// Runs one command line (args[0] is the program name). Diagnostics go to
// `err`; analyze output without --out goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lookahead::cli
