#pragma once

namespace forge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

// Entry point of the forge tool; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace forge::cli
