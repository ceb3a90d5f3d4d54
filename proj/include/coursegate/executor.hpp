#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coursegate/adapters.hpp"
#include "coursegate/artifact.hpp"
#include "coursegate/workflow.hpp"

namespace coursegate {

enum class ResourceKind { kPc, kCluster, kServiceGrid, kDesktopGrid, kCloud };

std::string_view to_string(ResourceKind kind) noexcept;
std::optional<ResourceKind> parse_resource_kind(std::string_view text) noexcept;

// A simulated DCI execution target.
struct Resource {
  std::string id;
  ResourceKind kind = ResourceKind::kPc;
  int slots = 1;
  double speed_factor = 1.0;  // multiplier on nominal task cost; lower is faster

  bool operator==(const Resource&) const = default;
};

// pool.json: list of {id, kind, slots, speed_factor}. Throws BAD_PARAMETER.
std::vector<Resource> pool_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<Resource>& pool);

enum class Policy { kRoundRobin, kFastestFit };

std::optional<Policy> parse_policy(std::string_view text) noexcept;

struct ExecutionPlan {
  std::string workflow_id;
  std::map<std::string, std::string> assignment;  // node id -> resource id
  std::vector<std::vector<std::string>> layers;
  std::vector<Resource> pool;
};

nlohmann::json to_json(const ExecutionPlan& plan);

// round_robin walks nodes in layer order (ids sorted inside a layer) and
// cycles through the pool sorted by id; fastest_fit puts every node on the
// lowest speed_factor, ties broken by resource id. Throws EMPTY_POOL,
// INVALID_WORKFLOW or BAD_PARAMETER (malformed pool).
ExecutionPlan plan_execution(const Workflow& wf, std::vector<Resource> pool, Policy policy);

enum class RunStatus { kQueued, kRunning, kSucceeded, kFailed, kCancelled };
enum class NodeState { kPending, kQueued, kRunning, kFinished, kFailed };
enum class EventType { kQueued, kStarted, kFinished, kFailed };

std::string_view to_string(RunStatus s) noexcept;
std::string_view to_string(NodeState s) noexcept;
std::string_view to_string(EventType e) noexcept;

// `seq` is the run's logical clock (strictly increasing per event); `time` is
// simulated time under the cost model (steps x speed_factor).
struct ExecutionEvent {
  std::uint64_t seq = 0;
  double time = 0.0;
  std::string node;
  EventType type = EventType::kQueued;
  std::string resource;
  std::string reason;

  bool operator==(const ExecutionEvent&) const = default;
};

struct NodeStatus {
  NodeState state = NodeState::kPending;
  std::string resource;
  std::string error;
  bool failed_by_dependency = false;

  bool operator==(const NodeStatus&) const = default;
};

struct ExecutionRecord {
  std::string run_id;
  std::string workflow_id;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::kQueued;
  std::vector<ExecutionEvent> events;
  std::map<std::string, NodeStatus> nodes;
  std::vector<Artifact> artifacts;  // in production order
  std::map<std::string, std::string> assignment;
  std::map<std::string, int> slots;  // resource id -> slots, for audits

  bool finalized() const noexcept {
    return status == RunStatus::kSucceeded || status == RunStatus::kFailed ||
           status == RunStatus::kCancelled;
  }
  const Artifact* find_artifact(std::string_view node, std::string_view port) const noexcept;
};

// Artifact bytes are omitted unless include_bytes is set.
nlohmann::json to_json(const ExecutionRecord& record, bool include_bytes = false);
ExecutionRecord record_from_json(const nlohmann::json& j);

// Inputs for in-ports that no link feeds.
using InputMap = std::map<PortRef, std::string>;

struct ExecutorOptions {
  std::size_t worker_limit = 4;
  // When set, artifacts are staged under runs_dir/<run-id>/<node>/<port> and
  // finalized records are written to runs_dir/<run-id>/record.json.
  std::optional<std::filesystem::path> runs_dir;
};

struct SubmitOptions {
  // Keep the run queued until release(); lets callers cancel before start.
  bool hold = false;
};

// Runs workflows on simulated resources. Scheduling happens in logical time
// on a per-run driver thread; adapter bodies execute on a shared worker pool
// bounded by worker_limit, so the recorded trace does not depend on the
// number of workers.
class Executor {
 public:
  Executor(std::shared_ptr<const AdapterRegistry> adapters, ExecutorOptions options = {});
  ~Executor();

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  // Returns immediately with the run id. Throws INVALID_WORKFLOW,
  // ADAPTER_MISSING or BAD_PARAMETER before anything starts.
  std::string submit(const ExecutionPlan& plan, const Workflow& wf, InputMap inputs,
                     std::uint64_t seed, SubmitOptions options = {});
  void release(const std::string& run_id);

  // Blocks until the run is finalized. Throws UNKNOWN_RUN.
  ExecutionRecord wait(const std::string& run_id);
  // Consistent point-in-time copy. Throws UNKNOWN_RUN.
  ExecutionRecord run_status(const std::string& run_id) const;
  // Queued nodes never start after this; running ones finish. Returns false
  // if the run had already finalized. Throws UNKNOWN_RUN.
  bool cancel(const std::string& run_id);

  ExecutionRecord execute(const ExecutionPlan& plan, const Workflow& wf, InputMap inputs,
                          std::uint64_t seed);

  // Registers an already finalized record (e.g. loaded from disk).
  void adopt(ExecutionRecord record);
  std::vector<std::string> run_ids() const;

  const AdapterRegistry& adapters() const noexcept { return *adapters_; }

 private:
  struct Run;
  class WorkerPool;

  std::shared_ptr<Run> find_run(const std::string& run_id) const;
  void drive(const std::shared_ptr<Run>& run);
  void persist(const ExecutionRecord& record) const;
  void stage(const Artifact& artifact) const;

  std::shared_ptr<const AdapterRegistry> adapters_;
  ExecutorOptions options_;
  std::unique_ptr<WorkerPool> pool_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Run>> runs_;
  std::uint64_t next_run_ = 1;
};

// Loads runs_dir/*/record.json with artifact bytes read from the staged
// files.
std::vector<ExecutionRecord> load_records(const std::filesystem::path& runs_dir);

}  // namespace coursegate
