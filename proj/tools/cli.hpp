#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fixsynth::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitIterationCap = 3;
inline constexpr int kExitViolation = 4;

// args[0] is the program name. Data goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace fixsynth::cli
