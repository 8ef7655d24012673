#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace feller::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (args[0] is the program name). CSV goes to
/// `--out` or, if absent or "-", to `out`; diagnostics go to `err`.
/// Returns 0 on success, 2 on usage errors, 3 on numerical or I/O failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace feller::cli
