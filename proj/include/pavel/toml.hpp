#pragma once

#include <string>

#include <json.hpp>

namespace pavel {

// Parses a TOML subset into JSON: comments, [section] and [a.b] headers,
// key = value pairs with strings, integers, floats, booleans, and
// (arbitrarily nested) arrays. Throws ConfigError with a line number on
// anything it does not understand.
nlohmann::json parse_toml(const std::string& text);

// Reads a config file as TOML or JSON, decided by extension (.json is JSON,
// everything else TOML).
nlohmann::json load_config_file(const std::string& path);

}  // namespace pavel
