#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace geohub {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one geohub subcommand. `args` excludes the program name.
/// Returns kExitOk, kExitUsage (synopsis written to `err`) or kExitData.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geohub
