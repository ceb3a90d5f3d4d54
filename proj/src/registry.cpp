#include "coursegate/registry.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <mutex>

#include "coursegate/canonical_json.hpp"
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

std::string trimmed_lower(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return lower(s);
}

std::vector<std::string> category_segments(std::string_view path) {
  std::vector<std::string> out;
  while (true) {
    auto pos = path.find(':');
    out.push_back(trimmed_lower(path.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    path.remove_prefix(pos + 1);
  }
  return out;
}

std::set<std::string> search_tokens(const ModuleMeta& m) {
  std::set<std::string> tokens;
  for (const auto& k : m.keywords) tokens.insert(trimmed_lower(k));
  std::string current;
  for (char raw : m.title) {
    auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '-' || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.insert(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(current);
  return tokens;
}

bool matches(const ModuleMeta& m, const SearchQuery& q) {
  if (q.scale && m.scale != *q.scale) return false;
  if (q.max_complexity && m.complexity > *q.max_complexity) return false;
  if (q.language) {
    auto want = trimmed_lower(*q.language);
    if (std::none_of(m.languages.begin(), m.languages.end(),
                     [&](const std::string& l) { return trimmed_lower(l) == want; })) {
      return false;
    }
  }
  if (q.category_prefix) {
    auto prefix = category_segments(*q.category_prefix);
    bool any = std::any_of(m.categories.begin(), m.categories.end(), [&](const std::string& c) {
      auto segs = category_segments(c);
      return segs.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), segs.begin());
    });
    if (!any) return false;
  }
  if (!q.keywords.empty()) {
    auto tokens = search_tokens(m);
    for (const auto& k : q.keywords) {
      if (!tokens.contains(trimmed_lower(k))) return false;
    }
  }
  return true;
}

// Exact comparison of sum/count means without floating point.
bool rated_before(const ModuleMeta& a, const ModuleMeta& b) {
  bool ra = a.rating.count > 0;
  bool rb = b.rating.count > 0;
  if (ra != rb) return ra;
  if (ra) {
    auto lhs = static_cast<unsigned __int128>(a.rating.sum) * b.rating.count;
    auto rhs = static_cast<unsigned __int128>(b.rating.sum) * a.rating.count;
    if (lhs != rhs) return lhs > rhs;
  }
  return a.id < b.id;
}

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& items) {
  auto out = json::array();
  for (const auto& [id, reason] : items) out.push_back({{"id", id}, {"reason", reason}});
  return out;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedArchive, "malformed archive: " + what);
}

}  // namespace

std::string utc_timestamp_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<ModuleMeta> search_modules(const std::vector<ModuleMeta>& modules,
                                       const SearchQuery& query) {
  std::vector<ModuleMeta> out;
  for (const auto& m : modules) {
    if (matches(m, query)) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), rated_before);
  return out;
}

nlohmann::json to_json(const ImportReport& report) {
  return {{"added", report.added},
          {"skipped", pairs_to_json(report.skipped)},
          {"external_refs", report.external_refs},
          {"workflows_added", report.workflows_added},
          {"skipped_workflows", pairs_to_json(report.skipped_workflows)}};
}

nlohmann::json to_json(const RatingAggregate& rating) {
  json j = {{"count", rating.count}, {"sum", rating.sum}};
  if (auto mean = rating.mean()) j["mean"] = *mean;
  return j;
}

Registry::Registry(std::string created_at) : created_at_(std::move(created_at)) {}

ModuleId Registry::register_module(ModuleMeta meta) {
  std::unique_lock lock(mutex_);
  std::set<ModuleId> known;
  for (const auto& [id, _] : modules_) known.insert(id);
  auto report = validate_meta(meta, known);
  if (report.has_errors()) {
    throw Error(ErrorCode::kValidationFailed, "module '" + meta.id + "' failed validation",
                to_json(report));
  }
  if (modules_.contains(meta.id)) {
    throw Error(ErrorCode::kDuplicateId, "module '" + meta.id + "' is already registered",
                {{"id", meta.id}});
  }
  auto id = meta.id;
  modules_.emplace(id, std::move(meta));
  return id;
}

void Registry::update_module(ModuleMeta meta) {
  std::unique_lock lock(mutex_);
  auto it = modules_.find(meta.id);
  if (it == modules_.end()) {
    throw Error(ErrorCode::kUnknownModule, "module '" + meta.id + "' is not registered",
                {{"id", meta.id}});
  }
  std::set<ModuleId> known;
  for (const auto& [id, _] : modules_) known.insert(id);
  auto report = validate_meta(meta, known);
  if (report.has_errors()) {
    throw Error(ErrorCode::kValidationFailed, "module '" + meta.id + "' failed validation",
                to_json(report));
  }
  it->second = std::move(meta);
}

std::optional<ModuleMeta> Registry::get(const ModuleId& id) const {
  std::shared_lock lock(mutex_);
  auto it = modules_.find(id);
  if (it == modules_.end()) return std::nullopt;
  return it->second;
}

std::vector<ModuleMeta> Registry::modules() const {
  std::shared_lock lock(mutex_);
  std::vector<ModuleMeta> out;
  out.reserve(modules_.size());
  for (const auto& [_, m] : modules_) out.push_back(m);
  return out;
}

std::set<ModuleId> Registry::ids() const {
  std::shared_lock lock(mutex_);
  std::set<ModuleId> out;
  for (const auto& [id, _] : modules_) out.insert(id);
  return out;
}

std::size_t Registry::size() const {
  std::shared_lock lock(mutex_);
  return modules_.size();
}

std::vector<ModuleMeta> Registry::search(const SearchQuery& query) const {
  return search_modules(modules(), query);
}

RatingAggregate Registry::rate(const ModuleId& id, int stars) {
  std::unique_lock lock(mutex_);
  auto it = modules_.find(id);
  if (it == modules_.end()) {
    throw Error(ErrorCode::kUnknownModule, "module '" + id + "' is not registered", {{"id", id}});
  }
  if (stars < 1 || stars > 5) {
    throw Error(ErrorCode::kStarsOutOfRange, "stars must be in 1..5", {{"stars", stars}});
  }
  it->second.rating.add_vote(stars);
  return it->second.rating;
}

void Registry::register_workflow(Workflow wf) {
  auto report = validate_workflow(wf);
  if (report.has_errors()) {
    throw Error(ErrorCode::kValidationFailed, "workflow '" + wf.id + "' failed validation",
                to_json(report));
  }
  std::unique_lock lock(mutex_);
  if (workflows_.contains(wf.id)) {
    throw Error(ErrorCode::kDuplicateId, "workflow '" + wf.id + "' is already registered",
                {{"id", wf.id}});
  }
  auto id = wf.id;
  workflows_.emplace(std::move(id), std::move(wf));
}

std::optional<Workflow> Registry::get_workflow(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = workflows_.find(id);
  if (it == workflows_.end()) return std::nullopt;
  return it->second;
}

std::vector<Workflow> Registry::workflows() const {
  std::shared_lock lock(mutex_);
  std::vector<Workflow> out;
  for (const auto& [_, wf] : workflows_) out.push_back(wf);
  return out;
}

std::string Registry::export_repository() const {
  std::shared_lock lock(mutex_);
  json archive = json::object();
  archive["format_version"] = kArchiveFormatVersion;
  archive["created_at"] = created_at_;
  auto modules = json::array();
  for (const auto& [_, m] : modules_) modules.push_back(to_json(m));
  auto workflows = json::array();
  for (const auto& [_, wf] : workflows_) workflows.push_back(to_json(wf));
  archive["modules"] = std::move(modules);
  archive["workflows"] = std::move(workflows);
  return canonical_dump(archive);
}

ImportReport Registry::import_repository(std::string_view bytes) {
  json archive;
  try {
    archive = parse_json(bytes);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  if (!archive.is_object()) malformed("top level must be an object");
  if (!archive.contains("format_version") || !archive.at("format_version").is_string()) {
    malformed("missing format_version");
  }
  auto version = archive.at("format_version").get<std::string>();
  if (version != kArchiveFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "archive format '" + version + "' is not supported",
                {{"format_version", version}});
  }
  std::string created_at;
  if (archive.contains("created_at")) {
    if (!archive.at("created_at").is_string()) malformed("created_at must be a string");
    created_at = archive.at("created_at").get<std::string>();
  }

  std::vector<ModuleMeta> incoming;
  std::set<ModuleId> incoming_ids;
  if (archive.contains("modules")) {
    if (!archive.at("modules").is_array()) malformed("modules must be an array");
    for (const auto& jm : archive.at("modules")) {
      try {
        incoming.push_back(module_from_json(jm));
      } catch (const std::exception& e) {
        malformed(std::string("module record: ") + e.what());
      }
      if (!incoming_ids.insert(incoming.back().id).second) {
        malformed("module id '" + incoming.back().id + "' appears twice");
      }
    }
  }
  std::vector<Workflow> incoming_wfs;
  if (archive.contains("workflows")) {
    if (!archive.at("workflows").is_array()) malformed("workflows must be an array");
    for (const auto& jw : archive.at("workflows")) {
      try {
        incoming_wfs.push_back(workflow_from_json(jw));
      } catch (const Error& e) {
        malformed(std::string("workflow record: ") + e.what());
      }
    }
  }

  std::sort(incoming.begin(), incoming.end(),
            [](const ModuleMeta& a, const ModuleMeta& b) { return a.id < b.id; });

  std::unique_lock lock(mutex_);
  ImportReport report;
  if (modules_.empty() && workflows_.empty() && !created_at.empty()) created_at_ = created_at;

  std::set<ModuleId> known = incoming_ids;
  for (const auto& [id, _] : modules_) known.insert(id);

  std::vector<const ModuleMeta*> added;
  for (auto& m : incoming) {
    if (modules_.contains(m.id)) {
      report.skipped.emplace_back(m.id, "DUPLICATE_ID");
      continue;
    }
    if (validate_meta(m, known).has_errors()) {
      report.skipped.emplace_back(m.id, "VALIDATION_FAILED");
      continue;
    }
    auto [it, _] = modules_.emplace(m.id, std::move(m));
    added.push_back(&it->second);
    ++report.added;
  }

  std::set<ModuleId> external;
  for (const auto* m : added) {
    for (const auto* refs : {&m->previous, &m->next, &m->alternatives}) {
      for (const auto& ref : *refs) {
        if (!modules_.contains(ref)) external.insert(ref);
      }
    }
  }
  report.external_refs.assign(external.begin(), external.end());

  for (auto& wf : incoming_wfs) {
    if (workflows_.contains(wf.id)) {
      report.skipped_workflows.emplace_back(wf.id, "DUPLICATE_ID");
    } else if (validate_workflow(wf).has_errors()) {
      report.skipped_workflows.emplace_back(wf.id, "VALIDATION_FAILED");
    } else {
      auto id = wf.id;
      workflows_.emplace(std::move(id), std::move(wf));
      ++report.workflows_added;
    }
  }
  return report;
}

std::string Registry::created_at() const {
  std::shared_lock lock(mutex_);
  return created_at_;
}

}  // namespace coursegate
