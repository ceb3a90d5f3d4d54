#pragma once

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coursegate/module_meta.hpp"
#include "coursegate/workflow.hpp"

namespace coursegate {

inline constexpr std::string_view kArchiveFormatVersion = "1.0";

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

struct SearchQuery {
  std::vector<std::string> keywords;  // every keyword must match
  std::optional<std::string> category_prefix;
  std::optional<ScaleLevel> scale;
  std::optional<std::string> language;
  std::optional<int> max_complexity;
};

// Filters `modules` and orders the result by descending mean rating (unrated
// last), then by id.
std::vector<ModuleMeta> search_modules(const std::vector<ModuleMeta>& modules,
                                       const SearchQuery& query);

struct ImportReport {
  std::size_t added = 0;
  std::vector<std::pair<ModuleId, std::string>> skipped;  // (id, reason code)
  std::vector<ModuleId> external_refs;
  std::size_t workflows_added = 0;
  std::vector<std::pair<std::string, std::string>> skipped_workflows;
};

nlohmann::json to_json(const ImportReport& report);
nlohmann::json to_json(const RatingAggregate& rating);

// Thread-safe module and workflow store. Reads may run concurrently; writes
// are serialized.
class Registry {
 public:
  explicit Registry(std::string created_at = utc_timestamp_now());

  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  // Throws VALIDATION_FAILED (details carry the report) or DUPLICATE_ID.
  ModuleId register_module(ModuleMeta meta);
  // Replaces an existing record; throws UNKNOWN_MODULE or VALIDATION_FAILED.
  void update_module(ModuleMeta meta);

  std::optional<ModuleMeta> get(const ModuleId& id) const;
  std::vector<ModuleMeta> modules() const;  // sorted by id
  std::set<ModuleId> ids() const;
  std::size_t size() const;

  std::vector<ModuleMeta> search(const SearchQuery& query) const;

  // Throws UNKNOWN_MODULE or STARS_OUT_OF_RANGE.
  RatingAggregate rate(const ModuleId& id, int stars);

  // Throws VALIDATION_FAILED or DUPLICATE_ID.
  void register_workflow(Workflow wf);
  std::optional<Workflow> get_workflow(const std::string& id) const;
  std::vector<Workflow> workflows() const;  // sorted by id

  // Canonical archive bytes; identical for identical logical state.
  std::string export_repository() const;
  // Throws MALFORMED_ARCHIVE or UNSUPPORTED_VERSION. An empty registry adopts
  // the archive's created_at so re-export reproduces the input bytes.
  ImportReport import_repository(std::string_view bytes);

  std::string created_at() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<ModuleId, ModuleMeta> modules_;
  std::map<std::string, Workflow> workflows_;
  std::string created_at_;
};

}  // namespace coursegate
