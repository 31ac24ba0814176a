#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgsym {

// Process exit codes of the fgsym tool.
inline constexpr int kExitExchangeable = 0;
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotExchangeable = 1;
inline constexpr int kExitBudgetExhausted = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitParse = 65;
inline constexpr int kExitInternal = 70;
inline constexpr int kExitIo = 74;

/// Runs the tool on `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgsym
