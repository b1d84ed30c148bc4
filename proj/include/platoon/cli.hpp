#pragma once

#include <ostream>

namespace platoon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the platoon_sim executable. Subcommands: run, compare, plot.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace platoon::cli
