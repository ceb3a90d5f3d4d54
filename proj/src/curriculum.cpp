#include "coursegate/curriculum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "coursegate/error.hpp"

namespace coursegate {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool cost_equal(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

[[noreturn]] void unknown_module(const ModuleId& id) {
  throw Error(ErrorCode::kUnknownModule, "module '" + id + "' is not in the graph", {{"id", id}});
}

bool speaks(const ModuleMeta& m, const std::string& language) {
  auto want = lower(language);
  return std::any_of(m.languages.begin(), m.languages.end(),
                     [&](const std::string& l) { return lower(l) == want; });
}

// Per-module constraint breaches (everything except the total-duration cap).
std::vector<std::string> module_violations(const ModuleMeta& m, const TrackConstraints& c) {
  std::vector<std::string> out;
  if (c.max_complexity && m.complexity > *c.max_complexity) out.emplace_back("max_complexity");
  if (c.allowed_scales && !c.allowed_scales->contains(m.scale)) out.emplace_back("allowed_scales");
  if (c.required_language && !speaks(m, *c.required_language)) out.emplace_back("required_language");
  return out;
}

bool satisfied_by(const PrereqGraph& g, const ModuleId& prereq, const std::vector<ModuleId>& placed) {
  return std::any_of(placed.begin(), placed.end(),
                     [&](const ModuleId& x) { return g.interchangeable(x, prereq); });
}

bool all_satisfied(const PrereqGraph& g, const ModuleId& m, const std::vector<ModuleId>& placed) {
  auto it = g.prerequisites.find(m);
  if (it == g.prerequisites.end()) return true;
  return std::all_of(it->second.begin(), it->second.end(),
                     [&](const ModuleId& p) { return satisfied_by(g, p, placed); });
}

// Branch-and-bound over module sets. A set is feasible when the greedy
// smallest-id-first ordering (target forced last) places every member; since
// placing more modules never un-satisfies a prerequisite, that greedy order is
// also the lexicographically smallest valid order of the set.
class TrackPlanner {
 public:
  TrackPlanner(const PrereqGraph& g, const ModuleId& target, const TrackConstraints& c)
      : g_(g), target_(target), c_(c) {
    for (const auto& id : g_.nodes) {
      satisfiers_[id].insert(id);
      for (const auto& alt : g_.alt_groups.at(id)) {
        satisfiers_[alt].insert(id);
        if (g_.contains(alt)) satisfiers_[id].insert(alt);
      }
    }
  }

  std::optional<std::vector<ModuleId>> run() {
    if (!eligible(target_)) return std::nullopt;
    explore({target_});
    return best_;
  }

  bool hit_external() const noexcept { return hit_external_; }

 private:
  bool eligible(const ModuleId& id) const {
    return module_violations(g_.meta.at(id), c_).empty();
  }

  void explore(const std::set<ModuleId>& members) {
    if (!visited_.insert(members).second) return;

    double cost = 0.0;
    std::int64_t minutes = 0;
    for (const auto& id : members) {
      cost += module_cost(g_.meta.at(id));
      minutes += g_.meta.at(id).duration.minutes;
    }
    if (c_.max_total_minutes && minutes > *c_.max_total_minutes) return;
    if (best_ && cost > best_cost_ && !cost_equal(cost, best_cost_)) return;

    std::vector<ModuleId> placed;
    std::vector<ModuleId> remaining;
    for (const auto& id : members) {
      if (id != target_) remaining.push_back(id);
    }
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = remaining.begin(); it != remaining.end(); ++it) {
        if (all_satisfied(g_, *it, placed)) {
          placed.push_back(*it);
          remaining.erase(it);
          progress = true;
          break;
        }
      }
    }
    if (remaining.empty() && all_satisfied(g_, target_, placed)) {
      placed.push_back(target_);
      if (!best_ || (cost < best_cost_ && !cost_equal(cost, best_cost_)) ||
          (cost_equal(cost, best_cost_) && placed < *best_)) {
        best_ = std::move(placed);
        best_cost_ = cost;
      }
      return;
    }

    // Any feasible superset must add a satisfier for some prerequisite that
    // the placed prefix leaves open; branch over all of them.
    remaining.push_back(target_);
    std::set<ModuleId> candidates;
    for (const auto& stuck : remaining) {
      auto it = g_.prerequisites.find(stuck);
      if (it == g_.prerequisites.end()) continue;
      for (const auto& p : it->second) {
        if (satisfied_by(g_, p, placed)) continue;
        auto s = satisfiers_.find(p);
        if (s == satisfiers_.end() || s->second.empty()) {
          if (!g_.contains(p)) hit_external_ = true;
          continue;
        }
        for (const auto& cand : s->second) {
          if (!members.contains(cand) && eligible(cand)) candidates.insert(cand);
        }
      }
    }
    for (const auto& cand : candidates) {
      auto next = members;
      next.insert(cand);
      explore(next);
    }
  }

  const PrereqGraph& g_;
  const ModuleId& target_;
  const TrackConstraints& c_;
  std::map<ModuleId, std::set<ModuleId>> satisfiers_;  // prerequisite -> graph modules that satisfy it
  std::set<std::set<ModuleId>> visited_;
  std::optional<std::vector<ModuleId>> best_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  bool hit_external_ = false;
};

}  // namespace

bool PrereqGraph::interchangeable(const ModuleId& a, const ModuleId& b) const {
  if (a == b) return true;
  if (auto it = alt_groups.find(a); it != alt_groups.end() && it->second.contains(b)) return true;
  if (auto it = alt_groups.find(b); it != alt_groups.end() && it->second.contains(a)) return true;
  return false;
}

PrereqGraph build_graph(const std::vector<ModuleMeta>& modules) {
  PrereqGraph g;
  for (const auto& m : modules) {
    if (!g.nodes.insert(m.id).second) {
      throw Error(ErrorCode::kDuplicateId, "module '" + m.id + "' appears twice", {{"id", m.id}});
    }
    g.meta.emplace(m.id, m);
  }
  for (const auto& m : modules) {
    auto& reqs = g.prerequisites[m.id];
    auto& next = g.suggests[m.id];
    auto& alts = g.alt_groups[m.id];
    for (const auto& p : m.previous) {
      if (std::find(reqs.begin(), reqs.end(), p) == reqs.end()) reqs.push_back(p);
      if (!g.contains(p)) g.external.insert(p);
    }
    for (const auto& n : m.next) {
      if (std::find(next.begin(), next.end(), n) == next.end()) next.push_back(n);
      if (!g.contains(n)) g.external.insert(n);
    }
    for (const auto& a : m.alternatives) {
      alts.insert(a);
      if (!g.contains(a)) g.external.insert(a);
    }
  }

  std::map<ModuleId, int> color;
  std::vector<ModuleId> stack;
  std::vector<ModuleId> cycle;
  std::function<bool(const ModuleId&)> dfs = [&](const ModuleId& u) {
    color[u] = 1;
    stack.push_back(u);
    for (const auto& v : g.prerequisites[u]) {
      if (!g.contains(v)) continue;
      if (color[v] == 1) {
        cycle.assign(std::find(stack.begin(), stack.end(), v), stack.end());
        cycle.push_back(v);
        return true;
      }
      if (color[v] == 0 && dfs(v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (const auto& id : g.nodes) {
    if (color[id] == 0 && dfs(id)) {
      std::string path;
      for (const auto& c : cycle) path += (path.empty() ? "" : " -> ") + c;
      throw Error(ErrorCode::kCycleDetected, "prerequisites form a cycle: " + path,
                  {{"cycle", cycle}});
    }
  }
  return g;
}

nlohmann::json to_json(const CourseTrack& track) {
  json j = {{"id", track.id}, {"title", track.title}, {"entries", track.entries}};
  if (!track.created_by.empty()) j["created_by"] = track.created_by;
  return j;
}

CourseTrack track_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("track must be a JSON object");
  CourseTrack t;
  auto str = [&](const char* key) -> std::string {
    if (!j.contains(key)) return {};
    if (!j.at(key).is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
    return j.at(key).get<std::string>();
  };
  t.id = str("id");
  t.title = str("title");
  t.created_by = str("created_by");
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    throw std::invalid_argument("track needs an entries array");
  }
  for (const auto& e : j.at("entries")) {
    if (!e.is_string()) throw std::invalid_argument("track entries must be module ids");
    t.entries.push_back(e.get<std::string>());
  }
  return t;
}

TrackConstraints constraints_from_json(const nlohmann::json& j) {
  TrackConstraints c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw std::invalid_argument("constraints must be an object");
  auto positive_int = [&](const char* key) -> std::optional<std::int64_t> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number_integer() || j.at(key).get<std::int64_t>() < 1) {
      throw std::invalid_argument(std::string(key) + " must be a positive integer");
    }
    return j.at(key).get<std::int64_t>();
  };
  c.max_total_minutes = positive_int("max_total_minutes");
  if (auto k = positive_int("max_complexity")) {
    if (*k > 5) throw std::invalid_argument("max_complexity must be in 1..5");
    c.max_complexity = static_cast<int>(*k);
  }
  if (j.contains("allowed_scales") && !j.at("allowed_scales").is_null()) {
    std::set<ScaleLevel> scales;
    for (const auto& s : j.at("allowed_scales")) {
      auto level = s.is_string() ? parse_scale(s.get<std::string>()) : std::nullopt;
      if (!level) throw std::invalid_argument("allowed_scales holds an unknown scale");
      scales.insert(*level);
    }
    c.allowed_scales = std::move(scales);
  }
  if (j.contains("required_language") && !j.at("required_language").is_null()) {
    if (!j.at("required_language").is_string()) {
      throw std::invalid_argument("required_language must be a string");
    }
    c.required_language = j.at("required_language").get<std::string>();
  }
  return c;
}

nlohmann::json to_json(const TrackConstraints& c) {
  json j = json::object();
  if (c.max_total_minutes) j["max_total_minutes"] = *c.max_total_minutes;
  if (c.max_complexity) j["max_complexity"] = *c.max_complexity;
  if (c.allowed_scales) {
    auto arr = json::array();
    for (auto s : *c.allowed_scales) arr.push_back(to_string(s));
    j["allowed_scales"] = arr;
  }
  if (c.required_language) j["required_language"] = *c.required_language;
  return j;
}

nlohmann::json to_json(const TrackReport& report) {
  auto out = json::array();
  for (const auto& f : report) {
    json j = {{"code", f.code}, {"message", f.message}};
    if (!f.module.empty()) j["module"] = f.module;
    if (!f.prerequisite.empty()) j["prerequisite"] = f.prerequisite;
    if (!f.constraint.empty()) j["constraint"] = f.constraint;
    out.push_back(std::move(j));
  }
  return out;
}

TrackReport check_track(const CourseTrack& track, const PrereqGraph& graph,
                        const TrackConstraints& constraints) {
  for (const auto& id : track.entries) {
    if (!graph.contains(id)) unknown_module(id);
  }
  TrackReport report;
  std::vector<ModuleId> placed;
  std::int64_t minutes = 0;
  for (const auto& id : track.entries) {
    if (std::find(placed.begin(), placed.end(), id) != placed.end()) {
      report.push_back({"DUPLICATE_ENTRY", id, {}, {}, "module '" + id + "' appears more than once"});
    }
    if (auto it = graph.prerequisites.find(id); it != graph.prerequisites.end()) {
      for (const auto& p : it->second) {
        if (!satisfied_by(graph, p, placed)) {
          report.push_back({"PREREQ_UNSATISFIED", id, p, {},
                            "'" + id + "' requires '" + p + "' (or an alternative) earlier in the track"});
        }
      }
    }
    const auto& meta = graph.meta.at(id);
    for (const auto& v : module_violations(meta, constraints)) {
      report.push_back({"CONSTRAINT_VIOLATION", id, {}, v, "'" + id + "' breaches " + v});
    }
    minutes += meta.duration.minutes;
    placed.push_back(id);
  }
  if (constraints.max_total_minutes && minutes > *constraints.max_total_minutes) {
    report.push_back({"CONSTRAINT_VIOLATION", {}, {}, "max_total_minutes",
                      "track lasts " + std::to_string(minutes) + " minutes, limit is " +
                          std::to_string(*constraints.max_total_minutes)});
  }
  return report;
}

double module_cost(const ModuleMeta& m) noexcept {
  return m.duration.weeks() * m.workload.midpoint();
}

double track_cost(const CourseTrack& track, const PrereqGraph& graph) {
  std::vector<ModuleId> ids = track.entries;
  std::sort(ids.begin(), ids.end());
  double total = 0.0;
  for (const auto& id : ids) {
    auto it = graph.meta.find(id);
    if (it == graph.meta.end()) unknown_module(id);
    total += module_cost(it->second);
  }
  return total;
}

CourseTrack plan_track(const ModuleId& target, const PrereqGraph& graph,
                       const TrackConstraints& constraints) {
  if (!graph.contains(target)) unknown_module(target);
  TrackPlanner planner(graph, target, constraints);
  auto best = planner.run();
  if (!best) {
    bool external = planner.hit_external();
    if (!constraints.empty()) {
      TrackPlanner unconstrained(graph, target, {});
      if (unconstrained.run()) {
        throw Error(ErrorCode::kUnsatisfiable,
                    "constraints exclude every valid track ending at '" + target + "'",
                    {{"target", target}, {"constraints", to_json(constraints)}});
      }
      external = unconstrained.hit_external();
    }
    if (external) {
      throw Error(ErrorCode::kUnresolvedPrereq,
                  "every track to '" + target + "' needs a module outside the registry",
                  {{"target", target}, {"external", graph.external}});
    }
    throw Error(ErrorCode::kUnsatisfiable, "no valid track ends at '" + target + "'",
                {{"target", target}});
  }
  CourseTrack track;
  track.id = "plan-" + target;
  track.title = "Track to " + graph.meta.at(target).title;
  track.entries = std::move(*best);
  track.created_by = "planner";
  return track;
}

nlohmann::json to_json(const CourseAggregate& agg) {
  json hist = json::object();
  for (auto level : {ScaleLevel::kNano, ScaleLevel::kMicro, ScaleLevel::kMini, ScaleLevel::kMacro}) {
    auto it = agg.scale_histogram.find(level);
    hist[std::string(to_string(level))] = it == agg.scale_histogram.end() ? 0 : it->second;
  }
  return {{"total_minutes", agg.total_minutes},
          {"total_weeks", agg.total_weeks()},
          {"workload_hours", {{"min", agg.workload_min_hours}, {"max", agg.workload_max_hours}}},
          {"max_complexity", agg.max_complexity},
          {"total_exercises", agg.total_exercises},
          {"total_price", agg.total_price},
          {"scale_histogram", hist}};
}

CourseAggregate aggregate(const CourseTrack& track, const std::map<ModuleId, ModuleMeta>& modules) {
  CourseAggregate agg;
  for (const auto& id : track.entries) {
    auto it = modules.find(id);
    if (it == modules.end()) unknown_module(id);
    const auto& m = it->second;
    agg.total_minutes += m.duration.minutes;
    agg.workload_min_hours += m.duration.weeks() * m.workload.min_hours_per_week;
    agg.workload_max_hours += m.duration.weeks() * m.workload.max_hours_per_week;
    agg.max_complexity = std::max(agg.max_complexity, m.complexity);
    agg.total_exercises += m.exercises;
    agg.total_price += m.price;
    ++agg.scale_histogram[m.scale];
  }
  return agg;
}

std::vector<ModuleId> list_next(const ModuleId& id, const PrereqGraph& graph) {
  if (!graph.contains(id)) unknown_module(id);
  std::set<ModuleId> out;
  if (auto it = graph.suggests.find(id); it != graph.suggests.end()) {
    out.insert(it->second.begin(), it->second.end());
  }
  for (const auto& [module, reqs] : graph.prerequisites) {
    if (std::find(reqs.begin(), reqs.end(), id) != reqs.end()) out.insert(module);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> lint_next_consistency(const PrereqGraph& graph) {
  std::vector<std::string> warnings;
  for (const auto& [id, nexts] : graph.suggests) {
    for (const auto& n : nexts) {
      if (!graph.contains(n)) continue;
      const auto& reqs = graph.prerequisites.at(n);
      if (std::find(reqs.begin(), reqs.end(), id) == reqs.end()) {
        warnings.push_back("'" + id + "' suggests '" + n + "' but '" + n +
                           "' does not list it as previous");
      }
    }
  }
  return warnings;
}

std::string to_dot(const PrereqGraph& graph) {
  std::ostringstream out;
  out << "digraph curriculum {\n  rankdir=LR;\n";
  for (const auto& id : graph.nodes) {
    out << "  \"" << id << "\" [label=\"" << id << "\\n"
        << to_string(graph.meta.at(id).scale) << "\"];\n";
  }
  for (const auto& id : graph.external) {
    out << "  \"" << id << "\" [shape=box, color=gray];\n";
  }
  for (const auto& [id, reqs] : graph.prerequisites) {
    for (const auto& p : reqs) out << "  \"" << p << "\" -> \"" << id << "\" [style=solid];\n";
  }
  for (const auto& [id, nexts] : graph.suggests) {
    for (const auto& n : nexts) out << "  \"" << id << "\" -> \"" << n << "\" [style=dashed];\n";
  }
  for (const auto& [id, alts] : graph.alt_groups) {
    for (const auto& a : alts) {
      out << "  \"" << id << "\" -> \"" << a << "\" [style=dotted, dir=none];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace coursegate
