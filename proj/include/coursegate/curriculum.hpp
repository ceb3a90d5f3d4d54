#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coursegate/module_meta.hpp"
#include "coursegate/scale.hpp"

namespace coursegate {

// Prerequisite graph over a module snapshot. `prerequisites` edges run from a
// module to each entry of its `previous` list, `suggests` to each entry of
// `next`. References to ids outside the snapshot are kept and also listed in
// `external`.
struct PrereqGraph {
  std::set<ModuleId> nodes;
  std::map<ModuleId, std::vector<ModuleId>> prerequisites;
  std::map<ModuleId, std::vector<ModuleId>> suggests;
  std::map<ModuleId, std::set<ModuleId>> alt_groups;
  std::set<ModuleId> external;
  std::map<ModuleId, ModuleMeta> meta;

  bool contains(const ModuleId& id) const { return nodes.contains(id); }
  // True if `a` and `b` are equal or either declares the other as an
  // alternative.
  bool interchangeable(const ModuleId& a, const ModuleId& b) const;
};

// Throws CYCLE_DETECTED (details.cycle lists one witness cycle) or
// DUPLICATE_ID.
PrereqGraph build_graph(const std::vector<ModuleMeta>& modules);

struct CourseTrack {
  std::string id;
  std::string title;
  std::vector<ModuleId> entries;
  std::string created_by;

  bool operator==(const CourseTrack&) const = default;
};

nlohmann::json to_json(const CourseTrack& track);
// Throws std::invalid_argument on shape errors.
CourseTrack track_from_json(const nlohmann::json& j);

struct TrackConstraints {
  std::optional<std::int64_t> max_total_minutes;
  std::optional<int> max_complexity;
  std::optional<std::set<ScaleLevel>> allowed_scales;
  std::optional<std::string> required_language;

  bool empty() const noexcept {
    return !max_total_minutes && !max_complexity && !allowed_scales && !required_language;
  }
};

TrackConstraints constraints_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrackConstraints& c);

struct TrackFinding {
  std::string code;          // PREREQ_UNSATISFIED, CONSTRAINT_VIOLATION, DUPLICATE_ENTRY
  ModuleId module;           // offending entry, empty for track-wide findings
  ModuleId prerequisite;     // PREREQ_UNSATISFIED only
  std::string constraint;    // CONSTRAINT_VIOLATION only
  std::string message;

  bool operator==(const TrackFinding&) const = default;
};

using TrackReport = std::vector<TrackFinding>;

nlohmann::json to_json(const TrackReport& report);

// Order-sensitive check. A prerequisite p of entry m is satisfied when p, or
// a module interchangeable with p, appears before m. Throws UNKNOWN_MODULE.
TrackReport check_track(const CourseTrack& track, const PrereqGraph& graph,
                        const TrackConstraints& constraints = {});

// Expected effort of one module: duration in weeks times the midpoint of its
// hours-per-week range.
double module_cost(const ModuleMeta& m) noexcept;
double track_cost(const CourseTrack& track, const PrereqGraph& graph);

// Cheapest track ending at `target` whose check_track report is empty.
// Equal-cost tracks are ordered by their id sequence; the smallest wins.
// Throws UNKNOWN_MODULE, UNSATISFIABLE or UNRESOLVED_PREREQ.
CourseTrack plan_track(const ModuleId& target, const PrereqGraph& graph,
                       const TrackConstraints& constraints = {});

struct CourseAggregate {
  std::int64_t total_minutes = 0;
  double workload_min_hours = 0.0;
  double workload_max_hours = 0.0;
  int max_complexity = 0;
  std::int64_t total_exercises = 0;
  double total_price = 0.0;
  std::map<ScaleLevel, std::size_t> scale_histogram;

  double total_weeks() const noexcept {
    return static_cast<double>(total_minutes) / static_cast<double>(Duration::kMinutesPerWeek);
  }
};

nlohmann::json to_json(const CourseAggregate& agg);

// Throws UNKNOWN_MODULE.
CourseAggregate aggregate(const CourseTrack& track, const std::map<ModuleId, ModuleMeta>& modules);

// Declared `next` entries plus every module that lists `id` in `previous`,
// sorted and deduplicated. Throws UNKNOWN_MODULE.
std::vector<ModuleId> list_next(const ModuleId& id, const PrereqGraph& graph);

// Warnings for `next` declarations not mirrored by the target's `previous`.
std::vector<std::string> lint_next_consistency(const PrereqGraph& graph);

// DOT rendering: requires solid, suggests dashed, alternatives dotted.
std::string to_dot(const PrereqGraph& graph);

}  // namespace coursegate
