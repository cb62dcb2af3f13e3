// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/// Applies one `key = value` setting. Unknown keys and malformed values
/// throw ConfigError. Per-UE lists are comma separated.
void apply_setting(SystemConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` format; `#` starts a comment.
SystemConfig parse_config(std::istream& in, SystemConfig base = {});
SystemConfig load_config_file(const std::string& path, SystemConfig base = {});

/// Writes every key with its current value, in a form parse_config reads back.
void write_config(std::ostream& out, const SystemConfig& config);

std::vector<std::string> config_keys();

}  // namespace isac
