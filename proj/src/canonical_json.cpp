#include "coursegate/canonical_json.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace coursegate {
namespace {

void dump_into(const json& value, std::string& out) {
  switch (value.type()) {
    case json::value_t::object: {
      // nlohmann::json objects are std::map backed, so iteration is already
      // in lexicographic key order.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += json(key).dump(-1, ' ', false, json::error_handler_t::strict);
        out.push_back(':');
        dump_into(item, out);
      }
      out.push_back('}');
      break;
    }
    case json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : value) {
        if (!first) out.push_back(',');
        first = false;
        dump_into(item, out);
      }
      out.push_back(']');
      break;
    }
    case json::value_t::number_float:
      out += format_decimal(value.get<double>());
      break;
    default:
      out += value.dump(-1, ' ', false, json::error_handler_t::strict);
      break;
  }
}

}  // namespace

std::string format_decimal(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite number has no canonical form");
  }
  if (value == 0.0) return "0";  // folds -0.0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("decimal formatting failed");
  return std::string(buf, end);
}

std::string canonical_dump(const json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

json parse_json(std::string_view text) {
  return json::parse(text.begin(), text.end());
}

}  // namespace coursegate
