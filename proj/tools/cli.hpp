#pragma once

#include <iostream>

namespace siri {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitAssumptions = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand: simulate, equilibria, check-assumptions, solve, diagnose, brackets.
int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace siri
