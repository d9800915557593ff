#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lepl::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 2;
inline constexpr int kFormatError = 3;
inline constexpr int kRuntimeError = 4;

/// Parses a flat `key = value` file. `#` starts a comment; blank lines are
/// skipped. Underscores in keys are read as dashes so keys match flag names.
std::map<std::string, std::string> read_config(const std::filesystem::path& path);

/// Runs one invocation. `args` excludes the program name, e.g.
/// {"theory", "n0", "--xi", "0"}. Returns the exit status; the summary line
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lepl::cli
