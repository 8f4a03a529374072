#pragma once

#include <string>
#include <vector>

namespace treeweave::cli {

/// Exit statuses of the command-line driver.
///   0  success
///   1  runtime failure (scenario error, capacity error, I/O failure)
///   2  usage error (unknown flags, invalid values)
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses and executes one invocation. argv follows main() conventions
/// (argv[0] is the program name).
int run_command(int argc, const char* const* argv);

/// Convenience wrapper for tests: args without the program name.
int run_command(const std::vector<std::string>& args);

}  // namespace treeweave::cli
