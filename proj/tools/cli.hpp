#pragma once

#include <iosfwd>

namespace llmpso::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_run_error = 1;
inline constexpr int exit_config_error = 2;

/// Entry point of the llmpso tool. Output goes to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace llmpso::cli
