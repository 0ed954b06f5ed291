#pragma once

// Command-line front end:
//
//   wavekin run <name|path> [--seed N] [--out DIR] [--override key=value]... [-v]
//   wavekin list [--template]
//   wavekin calibrate --mode photon|matter --omega X (--tau Y | --gamma Z)
//                     [--mean-intensity W] [--critical-constant C]
//
// Exit status: 0 success, 1 error (bad input, failed run), 2 a scenario ran
// but missed an acceptance threshold.

#include <iosfwd>
#include <string>
#include <vector>

namespace wavekin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitThreshold = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wavekin::cli
