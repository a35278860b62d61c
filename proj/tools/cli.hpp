#pragma once

// Command-line frontend. Every subcommand writes one run record
//   { tool, version, command, inputs, seed, results }
// as JSON, or as flattened "path,value" CSV rows with --format csv.
//
// Exit codes: 0 ok, 1 other errors, 2 formula parse errors,
// 3 ContinuityViolation, 4 NotStabilized.

#include <iosfwd>
#include <string>
#include <vector>

namespace pla::cli {

inline constexpr const char* tool_name = "pla-cli";
inline constexpr const char* tool_version = "1.0.0";

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pla::cli
