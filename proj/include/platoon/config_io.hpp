#pragma once

#include <filesystem>
#include <string>

#include "platoon/scenario.hpp"

namespace platoon::config_io {

/// Parses scenario JSON. Omitted fields take the values of the selected
/// "preset" (theoretical by default). Unknown keys, wrong types and invalid
/// values raise ConfigError; the message names the field and, when it can be
/// located in `text`, its line number.
scenario::ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");

scenario::ScenarioConfig load_config(const std::filesystem::path& path);

/// 1-based line of the entry addressed by a dotted field path such as
/// "leader_profile.segments[2].duration"; 0 if it cannot be found.
int locate_field_line(const std::string& text, const std::string& field);

} // namespace platoon::config_io
