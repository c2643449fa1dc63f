#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace napood {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `napood` tool. `args[0]` is the program name.
///
/// Subcommands: synth, score, eval, tune, analyze {channel-stats, hist}.
/// Returns 0 on success, 1 on usage errors, 2 on malformed or invalid data.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace napood
