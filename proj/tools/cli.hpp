#pragma once

#include <ostream>
#include <span>
#include <string>

namespace absaug::cli {

/// Exit codes: 0 success, 1 a stage failed, 2 bad usage.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace absaug::cli
