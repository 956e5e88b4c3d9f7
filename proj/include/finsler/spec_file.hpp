#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace finsler {

/// Reads the flat TOML subset used by metric spec files: `key = value`
/// lines with strings, numbers, booleans and (nested, possibly multi-line)
/// arrays; `#` comments. Tables are not supported.
nlohmann::json parse_toml_document(std::string_view text);

} // namespace finsler
