#pragma once

// Model configuration files. Both formats carry the same keys:
//   signature = { name = arity, ... }
//   probs     = { name = p, ... }
//   schedule  = [ n, ... ]
//   seed      = integer
// TOML input is limited to what these keys need: tables, integer, float and
// string values, arrays of numbers, and comments.

#include <pla/random_worlds.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace pla {

IidModel parse_model_json(std::string_view text);
IidModel parse_model_toml(std::string_view text);

/// Dispatches on the extension (.json or .toml). Throws pla::Error on I/O
/// failure, malformed input or a model that fails IidModel::validate.
IidModel load_model(const std::filesystem::path& path);

std::string model_to_json(const IidModel& model);

}  // namespace pla
