#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace coursegate {

using json = nlohmann::json;

// Canonical JSON text: object keys in lexicographic byte order, no
// insignificant whitespace, integers as integers, floating values in their
// shortest round-trip form with no trailing zeros (8.0 prints as "8").
std::string canonical_dump(const json& value);

// Parses UTF-8 JSON text; throws json::parse_error on malformed input.
json parse_json(std::string_view text);

// Shortest decimal representation of a double, used by canonical_dump.
std::string format_decimal(double value);

}  // namespace coursegate
