#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coursegate/curriculum.hpp"
#include "coursegate/executor.hpp"
#include "coursegate/registry.hpp"

namespace coursegate {

struct GatewayConfig {
  std::filesystem::path data_dir;
  std::size_t worker_limit = 4;
  bool enable_exec = false;
};

// Everything needed to start one run.
struct RunRequest {
  Workflow workflow;
  std::vector<Resource> pool;
  Policy policy = Policy::kRoundRobin;
  std::uint64_t seed = 0;
  InputMap inputs;
};

// Registry, planner and executor bound to one data directory. Registry state
// is written through to data_dir/repository.json after every mutation; run
// records and artifacts live under data_dir/runs. Request bodies with the
// wrong shape raise BAD_REQUEST.
class Gateway {
 public:
  // Loads existing state. Throws DATA_DIR_UNWRITABLE or MALFORMED_ARCHIVE.
  explicit Gateway(GatewayConfig config);

  const GatewayConfig& config() const noexcept { return config_; }
  const Registry& registry() const noexcept { return registry_; }
  Executor& executor() noexcept { return *executor_; }

  ModuleId add_module(const nlohmann::json& body);
  ModuleMeta module(const ModuleId& id) const;  // UNKNOWN_MODULE
  RatingAggregate rate(const ModuleId& id, int stars);
  ImportReport import_archive(std::string_view bytes);
  std::string export_archive() const { return registry_.export_repository(); }

  std::string add_workflow(const nlohmann::json& body);
  Workflow workflow(const std::string& id) const;  // NOT_FOUND
  // Structural report plus UNKNOWN_TOOL warnings against the adapter set.
  ValidationReport validate(const Workflow& wf) const;

  // Bodies: {"track": {...}, "constraints": {...}} or a bare track object.
  TrackReport check(const nlohmann::json& body) const;
  CourseAggregate aggregate(const nlohmann::json& body) const;
  // Body: {"target": id, "constraints": {...}}.
  CourseTrack plan(const nlohmann::json& body) const;
  PrereqGraph graph() const;

  // Body: {"workflow": id or inline object, "pool": [...], "policy": name,
  // "seed": n, "inputs": {node: {port: text}}}. The default pool is a single
  // one-slot pc named pc-1.
  RunRequest run_request(const nlohmann::json& body) const;
  std::string submit(const RunRequest& request, SubmitOptions options = {});
  ExecutionRecord run(const std::string& run_id) const;  // UNKNOWN_RUN
  // NOT_FOUND when the run has no such artifact (yet).
  std::string artifact(const std::string& run_id, const std::string& node,
                       const std::string& port) const;

  void flush();

 private:
  void persist();

  GatewayConfig config_;
  Registry registry_;
  std::unique_ptr<Executor> executor_;
  std::mutex write_mutex_;
};

// Parses a body or file as JSON; malformed text raises BAD_REQUEST.
nlohmann::json parse_body(std::string_view text);

}  // namespace coursegate
