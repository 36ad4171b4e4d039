#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clutter::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kGuard = 1;
inline constexpr int kBadFlags = 2;
inline constexpr int kBadModel = 3;
inline constexpr int kChecksFailed = 4;

/// Runs the tool with `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace clutter::cli
