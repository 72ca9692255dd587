#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zw {

// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O, decode, or engine errors
inline constexpr int kExitUsage = 2;

// Entry point of the `zoomwrite` tool. args excludes the program name.
//
//   train <corpus> -o <snapshot> [--order N]
//   entropy <snapshot> <text> [--adapt]
//   compress <snapshot> <in> -o <bits>
//   decompress <snapshot> <bits> -o <out>
//   simulate <snapshot> --target <file> [--rate R] [--jitter J] [--seed S] [--runs N]
//   serve <snapshot> [--port P | --stdio]
//
// Every subcommand accepts --alphabet <file>. Results go to out,
// diagnostics to err.
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace zw
