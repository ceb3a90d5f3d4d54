#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coursegate/report.hpp"

namespace coursegate {

// Slug identifier, `[a-z0-9][a-z0-9-]*`, at most 128 characters.
using ModuleId = std::string;

bool is_valid_module_id(std::string_view id) noexcept;

// Lowercases, maps whitespace to '-', strips punctuation other than '-'.
ModuleId slugify(std::string_view title);

struct Duration {
  static constexpr std::int64_t kMinutesPerHour = 60;
  static constexpr std::int64_t kMinutesPerDay = 24 * kMinutesPerHour;
  static constexpr std::int64_t kMinutesPerWeek = 7 * kMinutesPerDay;
  static constexpr std::int64_t kMinutesPerMonth = 30 * kMinutesPerDay;

  std::int64_t minutes = 1;

  static constexpr Duration from_minutes(std::int64_t m) { return {m}; }
  static constexpr Duration from_hours(std::int64_t h) { return {h * kMinutesPerHour}; }
  static constexpr Duration from_days(std::int64_t d) { return {d * kMinutesPerDay}; }
  static constexpr Duration from_weeks(std::int64_t w) { return {w * kMinutesPerWeek}; }
  static constexpr Duration from_months(std::int64_t m) { return {m * kMinutesPerMonth}; }

  double weeks() const noexcept {
    return static_cast<double>(minutes) / static_cast<double>(kMinutesPerWeek);
  }

  auto operator<=>(const Duration&) const = default;
};

// Accepts "20 min", "2 weeks", "3 months", "8 h", "1 day" and bare integers
// (minutes). Throws std::invalid_argument otherwise.
Duration parse_duration(std::string_view text);

enum class ScaleLevel { kNano = 0, kMicro = 1, kMini = 2, kMacro = 3 };

std::string_view to_string(ScaleLevel level) noexcept;
// Case-insensitive; nullopt for anything outside the four levels.
std::optional<ScaleLevel> parse_scale(std::string_view text) noexcept;

struct WorkloadRange {
  double min_hours_per_week = 1.0;
  double max_hours_per_week = 1.0;

  double midpoint() const noexcept {
    return 0.5 * (min_hours_per_week + max_hours_per_week);
  }
  bool operator==(const WorkloadRange&) const = default;
};

// Exact star rating stored as (count, sum); the mean is derived.
struct RatingAggregate {
  std::uint64_t count = 0;
  std::uint64_t sum = 0;

  std::optional<double> mean() const noexcept {
    if (count == 0) return std::nullopt;
    return static_cast<double>(sum) / static_cast<double>(count);
  }
  void add_vote(int stars) noexcept {
    ++count;
    sum += static_cast<std::uint64_t>(stars);
  }
  bool operator==(const RatingAggregate&) const = default;
};

enum class ModuleKind { kPassive, kActive };

struct ModuleMeta {
  ModuleId id;
  std::string title;
  std::vector<ModuleId> previous;
  std::vector<ModuleId> next;
  std::vector<ModuleId> alternatives;
  std::vector<std::string> categories;
  int complexity = 1;
  ScaleLevel scale = ScaleLevel::kNano;
  Duration duration;
  WorkloadRange workload;
  std::int64_t exercises = 0;
  std::vector<std::string> keywords;
  std::vector<std::string> languages;
  RatingAggregate rating;
  bool certificate = false;
  double price = 0.0;
  ModuleKind kind = ModuleKind::kPassive;
  // Fields this version does not understand, carried through import/export.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const ModuleMeta&) const = default;
};

// Structural violations are errors; unresolved references, scale/duration
// disagreement and oversize durations are warnings.
ValidationReport validate_meta(const ModuleMeta& meta,
                               const std::set<ModuleId>& known_ids);

// Canonical JSON form of a module record.
nlohmann::json to_json(const ModuleMeta& meta);

// Reads the canonical form and the authoring conveniences: `id` may be
// omitted (derived from the title), `duration` may be a string like
// "2 weeks", `workload` may be "8-10" or a single number, `rating` may be a
// single star value, `keywords` may be a comma separated string, and
// `certificate` may be "Yes"/"No". Throws std::invalid_argument on shape
// errors.
ModuleMeta module_from_json(const nlohmann::json& j);

}  // namespace coursegate
