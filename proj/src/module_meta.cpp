#include "coursegate/module_meta.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "coursegate/scale.hpp"

namespace coursegate {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  while (!text.empty()) {
    auto pos = text.find(sep);
    auto item = trim(text.substr(0, pos));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

double parse_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_string()) return split_list(v.get<std::string>(), ',');
  if (!v.is_array()) throw std::invalid_argument(std::string(key) + " must be a list of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw std::invalid_argument(std::string(key) + " must be a list of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

template <typename T>
T number_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      double d = v.get<double>();
      if (d != std::floor(d)) throw std::invalid_argument(std::string(key) + " must be an integer");
      return static_cast<T>(d);
    }
  }
  return v.get<T>();
}

WorkloadRange parse_workload(const json& v) {
  if (v.is_number()) {
    double x = v.get<double>();
    return {x, x};
  }
  if (v.is_string()) {
    auto text = v.get<std::string>();
    if (auto slash = text.find('('); slash != std::string::npos) text.resize(slash);
    auto dash = text.find('-');
    if (dash == std::string::npos) {
      double x = parse_number(text);
      return {x, x};
    }
    return {parse_number(std::string_view(text).substr(0, dash)),
            parse_number(std::string_view(text).substr(dash + 1))};
  }
  if (v.is_object()) {
    return {number_field<double>(v, "min_hours_per_week", 0.0),
            number_field<double>(v, "max_hours_per_week", 0.0)};
  }
  throw std::invalid_argument("workload must be a number, \"min-max\" string or object");
}

RatingAggregate parse_rating(const json& v) {
  if (v.is_number_integer()) {
    RatingAggregate r;
    r.add_vote(v.get<int>());
    return r;
  }
  if (v.is_object()) {
    return {number_field<std::uint64_t>(v, "count", 0),
            number_field<std::uint64_t>(v, "sum", 0)};
  }
  throw std::invalid_argument("rating must be a star value or {count, sum}");
}

bool parse_yes_no(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    auto s = lower(trim(v.get<std::string>()));
    if (s == "yes" || s == "true") return true;
    if (s == "no" || s == "false") return false;
  }
  throw std::invalid_argument("certificate must be a boolean or Yes/No");
}

const std::set<std::string, std::less<>> kKnownKeys = {
    "id", "title", "previous", "next", "alternatives", "categories",
    "complexity", "scale", "duration", "duration_minutes", "workload",
    "exercises", "keywords", "languages", "rating", "certificate", "price",
    "kind"};

}  // namespace

bool is_valid_module_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > 128) return false;
  auto ok = [](char c, bool first) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return true;
    return !first && c == '-';
  };
  if (!ok(id.front(), true)) return false;
  return std::all_of(id.begin() + 1, id.end(), [&](char c) { return ok(c, false); });
}

ModuleId slugify(std::string_view title) {
  std::string out;
  for (char raw : title) {
    auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) && c < 0x80) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c) || c == '-') {
      if (!out.empty() && out.back() != '-') out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  if (out.size() > 128) out.resize(128);
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

Duration parse_duration(std::string_view text) {
  text = trim(text);
  std::size_t i = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == 0) throw std::invalid_argument("duration must start with a count");
  std::int64_t count = 0;
  std::from_chars(text.data(), text.data() + i, count);
  auto unit = lower(trim(text.substr(i)));
  if (!unit.empty() && unit.front() == '(' && unit.back() == ')') {
    unit = unit.substr(1, unit.size() - 2);
  }
  while (!unit.empty() && unit.back() == '.') unit.pop_back();
  if (unit.empty() || unit == "min" || unit == "mins" || unit == "minute" || unit == "minutes") {
    return Duration::from_minutes(count);
  }
  if (unit == "h" || unit == "hour" || unit == "hours") return Duration::from_hours(count);
  if (unit == "d" || unit == "day" || unit == "days") return Duration::from_days(count);
  if (unit == "w" || unit == "week" || unit == "weeks") return Duration::from_weeks(count);
  if (unit == "month" || unit == "months") return Duration::from_months(count);
  throw std::invalid_argument("unknown duration unit '" + unit + "'");
}

std::string_view to_string(ScaleLevel level) noexcept {
  switch (level) {
    case ScaleLevel::kNano: return "nano";
    case ScaleLevel::kMicro: return "micro";
    case ScaleLevel::kMini: return "mini";
    case ScaleLevel::kMacro: return "macro";
  }
  return "nano";
}

std::optional<ScaleLevel> parse_scale(std::string_view text) noexcept {
  auto s = lower(trim(text));
  if (s == "nano") return ScaleLevel::kNano;
  if (s == "micro") return ScaleLevel::kMicro;
  if (s == "mini") return ScaleLevel::kMini;
  if (s == "macro") return ScaleLevel::kMacro;
  return std::nullopt;
}

ValidationReport validate_meta(const ModuleMeta& meta,
                               const std::set<ModuleId>& known_ids) {
  ValidationReport report;
  if (!is_valid_module_id(meta.id)) {
    report.error("INVALID_ID", "module id '" + meta.id + "' is not a valid slug", "id");
  }
  if (trim(meta.title).empty()) {
    report.error("EMPTY_TITLE", "title must not be empty", "title");
  }

  auto check_refs = [&](const std::vector<ModuleId>& refs, const char* field) {
    for (const auto& ref : refs) {
      if (ref == meta.id) {
        report.error("SELF_REFERENCE", "module lists itself in " + std::string(field), field);
      } else if (!is_valid_module_id(ref)) {
        report.error("INVALID_REFERENCE", "'" + ref + "' is not a valid module id", field);
      } else if (!known_ids.contains(ref)) {
        report.warning("UNRESOLVED_REFERENCE", "'" + ref + "' is not a known module", field);
      }
    }
  };
  check_refs(meta.previous, "previous");
  check_refs(meta.next, "next");
  check_refs(meta.alternatives, "alternatives");

  for (const auto& category : meta.categories) {
    auto segments = split_list(category, ':');
    auto raw_segments = std::count(category.begin(), category.end(), ':') + 1;
    if (segments.empty() || static_cast<long>(segments.size()) != raw_segments) {
      report.error("INVALID_CATEGORY", "category '" + category + "' has an empty segment",
                   "categories");
    }
  }

  if (meta.complexity < 1 || meta.complexity > 5) {
    report.error("COMPLEXITY_OUT_OF_RANGE", "complexity must be in 1..5", "complexity");
  }

  bool duration_ok = meta.duration.minutes >= 1;
  if (!duration_ok) {
    report.error("INVALID_DURATION", "duration must be at least one minute", "duration_minutes");
  }

  const auto& w = meta.workload;
  if (!(std::isfinite(w.min_hours_per_week) && std::isfinite(w.max_hours_per_week) &&
        w.min_hours_per_week > 0 && w.min_hours_per_week <= w.max_hours_per_week)) {
    report.error("INVALID_WORKLOAD", "workload must satisfy 0 < min <= max", "workload");
  }
  if (meta.exercises < 0) {
    report.error("NEGATIVE_EXERCISES", "exercises must be non-negative", "exercises");
  }
  if (meta.rating.sum < meta.rating.count || meta.rating.sum > 5 * meta.rating.count) {
    report.error("INVALID_RATING", "rating sum must be between count and 5*count", "rating");
  }
  if (!std::isfinite(meta.price) || meta.price < 0) {
    report.error("NEGATIVE_PRICE", "price must be a non-negative number", "price");
  }

  bool has_english = std::any_of(meta.languages.begin(), meta.languages.end(),
                                 [](const std::string& l) { return lower(trim(l)) == "english"; });
  if (!has_english) {
    report.error("MISSING_ENGLISH", "English must be among the module languages", "languages");
  }

  if (duration_ok) {
    auto cls = classify_scale_checked(meta.duration);
    if (cls.level != meta.scale) {
      report.warning("SCALE_MISMATCH",
                     "declared scale " + std::string(to_string(meta.scale)) +
                         " but duration classifies as " + std::string(to_string(cls.level)),
                     "scale");
    }
    if (cls.oversize) {
      report.warning("OVERSIZE", "duration exceeds six months", "duration_minutes");
    }
  }
  return report;
}

nlohmann::json to_json(const ModuleMeta& meta) {
  json j = meta.extra.is_object() ? meta.extra : json::object();
  j["id"] = meta.id;
  j["title"] = meta.title;
  j["previous"] = meta.previous;
  j["next"] = meta.next;
  j["alternatives"] = meta.alternatives;
  j["categories"] = meta.categories;
  j["complexity"] = meta.complexity;
  j["scale"] = to_string(meta.scale);
  j["duration_minutes"] = meta.duration.minutes;
  j["workload"] = {{"min_hours_per_week", meta.workload.min_hours_per_week},
                   {"max_hours_per_week", meta.workload.max_hours_per_week}};
  j["exercises"] = meta.exercises;
  j["keywords"] = meta.keywords;
  j["languages"] = meta.languages;
  j["rating"] = {{"count", meta.rating.count}, {"sum", meta.rating.sum}};
  j["certificate"] = meta.certificate;
  j["price"] = meta.price;
  j["kind"] = meta.kind == ModuleKind::kActive ? "active" : "passive";
  return j;
}

ModuleMeta module_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("module record must be a JSON object");
  ModuleMeta m;
  if (j.contains("title")) {
    if (!j.at("title").is_string()) throw std::invalid_argument("title must be a string");
    m.title = j.at("title").get<std::string>();
  }
  if (j.contains("id")) {
    if (!j.at("id").is_string()) throw std::invalid_argument("id must be a string");
    m.id = j.at("id").get<std::string>();
  } else {
    m.id = slugify(m.title);
  }
  m.previous = string_list(j, "previous");
  m.next = string_list(j, "next");
  m.alternatives = string_list(j, "alternatives");
  m.categories = string_list(j, "categories");
  m.complexity = number_field<int>(j, "complexity", 1);

  if (j.contains("duration_minutes")) {
    m.duration.minutes = number_field<std::int64_t>(j, "duration_minutes", 1);
  } else if (j.contains("duration")) {
    const auto& d = j.at("duration");
    if (d.is_string()) {
      m.duration = parse_duration(d.get<std::string>());
    } else if (d.is_number_integer()) {
      m.duration = Duration::from_weeks(d.get<std::int64_t>());  // bare number means weeks
    } else {
      throw std::invalid_argument("duration must be a string such as \"2 weeks\"");
    }
  }

  if (j.contains("scale")) {
    if (!j.at("scale").is_string()) throw std::invalid_argument("scale must be a string");
    auto level = parse_scale(j.at("scale").get<std::string>());
    if (!level) throw std::invalid_argument("scale must be one of nano, micro, mini, macro");
    m.scale = *level;
  } else {
    m.scale = classify_scale(m.duration);
  }

  if (j.contains("workload")) m.workload = parse_workload(j.at("workload"));
  m.exercises = number_field<std::int64_t>(j, "exercises", 0);
  m.keywords = string_list(j, "keywords");
  m.languages = string_list(j, "languages");
  if (j.contains("rating")) m.rating = parse_rating(j.at("rating"));
  if (j.contains("certificate")) m.certificate = parse_yes_no(j.at("certificate"));
  m.price = number_field<double>(j, "price", 0.0);
  if (j.contains("kind")) {
    auto kind = j.at("kind").is_string() ? lower(j.at("kind").get<std::string>()) : "";
    if (kind == "active") {
      m.kind = ModuleKind::kActive;
    } else if (kind == "passive") {
      m.kind = ModuleKind::kPassive;
    } else {
      throw std::invalid_argument("kind must be passive or active");
    }
  }

  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.contains(key)) m.extra[key] = value;
  }
  return m;
}

}  // namespace coursegate
