#pragma once

// Command-line front end. Subcommands:
//
//   replicate       targeted validation of honest, tampered and drifted claims
//   sweep-detect    exact detection probability over a parameter grid
//   simulate        Monte Carlo detection rates vs the exact values
//   calibrate-cost  linear cost fit and effort ratios from timing rows
//
// Exit codes: 0 success (including expected detections), 1 a statistical or
// reproduction check failed, 2 usage or configuration error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace averify {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

// Parses "1..4", "1,2,5" or a mix like "1..3,8" into a value list.
std::vector<std::uint32_t> parse_u32_list(const std::string& text);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace averify
