#pragma once

#include "argmine/harness/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace argmine::harness {

// Flat `key = value` text, '#' starts a comment. Keys are free-form; the
// consumers document which ones they read.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::filesystem::path& path);

// FNV-1a over the sorted, resolved key=value pairs.
std::uint64_t config_hash(const KeyValues& kv);

// Builds a TrainConfig from key-values; unknown keys are rejected so typos
// fail loudly. Recognized keys are listed in the README.
TrainConfig train_config_from(const KeyValues& kv);

// The resolved key-value view of a TrainConfig (defaults filled in), used
// for hashing and for echoing the configuration into reports.
KeyValues to_key_values(const TrainConfig& config);

} // namespace argmine::harness
