#pragma once

#include <iosfwd>

namespace sfvem {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand: mesh, check, solve or converge.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sfvem
