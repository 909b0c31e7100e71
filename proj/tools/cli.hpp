#pragma once

#include <string>
#include <vector>

namespace nlda::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace nlda::cli
