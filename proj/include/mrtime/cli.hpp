#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrtime::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `mrtime` tool. `args` excludes the program name.
/// Data goes to `out` (or the files named by flags), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrtime::cli
