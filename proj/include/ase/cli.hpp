#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ase {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs the command line `args` (args[0] is the program name). Results go to
/// the output directory; the summary table goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ase
