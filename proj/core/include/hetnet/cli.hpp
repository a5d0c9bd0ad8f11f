#pragma once

#include <ostream>

namespace hetnet {

// Exit codes of the hetnet command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Entry point of the hetnet tool. CSV goes to --out or `out`, error JSON to
// `err`, one object per line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetnet
