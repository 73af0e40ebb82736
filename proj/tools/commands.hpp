#pragma once

#include <string>
#include <vector>

namespace monolab::cli {

enum ExitCode : int { kOk = 0, kUsageError = 1, kNumericalError = 2 };

/// Parses argv and dispatches to a subcommand. Never throws; failures map
/// to exit codes and a one-line diagnostic on stderr.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

/// Worker count after applying the MONOTONE_LAB_THREADS override.
int resolve_threads(int requested);

}  // namespace monolab::cli
