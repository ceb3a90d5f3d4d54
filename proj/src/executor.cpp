#include "coursegate/executor.hpp"

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include "coursegate/canonical_json.hpp"
#include "coursegate/error.hpp"

namespace coursegate {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool ok = false;
  AdapterOutputs outputs;
  std::string error;
};

std::uint64_t node_seed(std::uint64_t run_seed, std::string_view node_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : node_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t state = run_seed ^ h;
  return splitmix64(state);
}

double nominal_cost(const CrateNode& node) {
  auto it = node.parameters.find("steps");
  if (it == node.parameters.end()) return 1.0;
  double steps = 0.0;
  const auto& text = it->second;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), steps);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(steps > 0.0)) return 1.0;
  return steps;
}

void check_pool(const std::vector<Resource>& pool) {
  std::set<std::string> ids;
  for (const auto& r : pool) {
    if (!is_valid_token(r.id)) {
      throw Error(ErrorCode::kBadParameter, "resource id '" + r.id + "' is not a valid token");
    }
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kBadParameter, "resource id '" + r.id + "' appears twice");
    }
    if (r.slots < 1) throw Error(ErrorCode::kBadParameter, "resource '" + r.id + "' needs slots >= 1");
    if (!(r.speed_factor > 0.0)) {
      throw Error(ErrorCode::kBadParameter, "resource '" + r.id + "' needs speed_factor > 0");
    }
  }
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

constexpr std::pair<std::string_view, ResourceKind> kResourceKinds[] = {
    {"pc", ResourceKind::kPc},
    {"cluster", ResourceKind::kCluster},
    {"service_grid", ResourceKind::kServiceGrid},
    {"desktop_grid", ResourceKind::kDesktopGrid},
    {"cloud", ResourceKind::kCloud}};
constexpr std::pair<std::string_view, RunStatus> kRunStatuses[] = {
    {"queued", RunStatus::kQueued},
    {"running", RunStatus::kRunning},
    {"succeeded", RunStatus::kSucceeded},
    {"failed", RunStatus::kFailed},
    {"cancelled", RunStatus::kCancelled}};
constexpr std::pair<std::string_view, NodeState> kNodeStates[] = {
    {"pending", NodeState::kPending},
    {"queued", NodeState::kQueued},
    {"running", NodeState::kRunning},
    {"finished", NodeState::kFinished},
    {"failed", NodeState::kFailed}};
constexpr std::pair<std::string_view, EventType> kEventTypes[] = {
    {"queued", EventType::kQueued},
    {"started", EventType::kStarted},
    {"finished", EventType::kFinished},
    {"failed", EventType::kFailed}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "unknown";
}

template <typename Enum, std::size_t N>
Enum enum_field(const json& j, const char* key, const std::pair<std::string_view, Enum> (&table)[N]) {
  auto value = parse_enum(j.at(key).get<std::string>(), table);
  if (!value) throw std::invalid_argument(std::string("unknown value for ") + key);
  return *value;
}

}  // namespace

std::string_view to_string(ResourceKind kind) noexcept { return name_of(kind, kResourceKinds); }
std::string_view to_string(RunStatus s) noexcept { return name_of(s, kRunStatuses); }
std::string_view to_string(NodeState s) noexcept { return name_of(s, kNodeStates); }
std::string_view to_string(EventType e) noexcept { return name_of(e, kEventTypes); }

std::optional<ResourceKind> parse_resource_kind(std::string_view text) noexcept {
  return parse_enum(text, kResourceKinds);
}

std::optional<Policy> parse_policy(std::string_view text) noexcept {
  if (text == "round_robin") return Policy::kRoundRobin;
  if (text == "fastest_fit") return Policy::kFastestFit;
  return std::nullopt;
}

std::vector<Resource> pool_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kBadParameter, "pool must be a JSON array");
  std::vector<Resource> pool;
  for (const auto& jr : j) {
    try {
      Resource r;
      r.id = jr.at("id").get<std::string>();
      auto kind = parse_resource_kind(jr.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::kBadParameter, "unknown resource kind for '" + r.id + "'");
      r.kind = *kind;
      r.slots = jr.value("slots", 1);
      r.speed_factor = jr.value("speed_factor", 1.0);
      pool.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kBadParameter, std::string("malformed resource: ") + e.what());
    }
  }
  check_pool(pool);
  return pool;
}

nlohmann::json to_json(const std::vector<Resource>& pool) {
  auto out = json::array();
  for (const auto& r : pool) {
    out.push_back({{"id", r.id}, {"kind", to_string(r.kind)}, {"slots", r.slots},
                   {"speed_factor", r.speed_factor}});
  }
  return out;
}

nlohmann::json to_json(const ExecutionPlan& plan) {
  return {{"workflow_id", plan.workflow_id},
          {"assignment", plan.assignment},
          {"layers", plan.layers},
          {"pool", to_json(plan.pool)}};
}

ExecutionPlan plan_execution(const Workflow& wf, std::vector<Resource> pool, Policy policy) {
  if (pool.empty()) throw Error(ErrorCode::kEmptyPool, "resource pool is empty");
  check_pool(pool);
  std::sort(pool.begin(), pool.end(), [](const Resource& a, const Resource& b) { return a.id < b.id; });

  ExecutionPlan plan;
  plan.workflow_id = wf.id;
  plan.layers = topo_layers(wf);
  std::size_t i = 0;
  const Resource* fastest = &*std::min_element(
      pool.begin(), pool.end(), [](const Resource& a, const Resource& b) {
        return a.speed_factor < b.speed_factor || (a.speed_factor == b.speed_factor && a.id < b.id);
      });
  for (const auto& layer : plan.layers) {
    for (const auto& node : layer) {
      plan.assignment[node] =
          policy == Policy::kRoundRobin ? pool[i++ % pool.size()].id : fastest->id;
    }
  }
  plan.pool = std::move(pool);
  return plan;
}

const Artifact* ExecutionRecord::find_artifact(std::string_view node,
                                               std::string_view port) const noexcept {
  for (const auto& a : artifacts) {
    if (a.node == node && a.port == port) return &a;
  }
  return nullptr;
}

nlohmann::json to_json(const ExecutionRecord& record, bool include_bytes) {
  auto events = json::array();
  for (const auto& e : record.events) {
    json je = {{"seq", e.seq}, {"time", e.time}, {"node", e.node}, {"type", to_string(e.type)}};
    if (!e.resource.empty()) je["resource"] = e.resource;
    if (!e.reason.empty()) je["reason"] = e.reason;
    events.push_back(std::move(je));
  }
  json nodes = json::object();
  for (const auto& [id, n] : record.nodes) {
    json jn = {{"state", to_string(n.state)}, {"resource", n.resource},
               {"failed_by_dependency", n.failed_by_dependency}};
    if (!n.error.empty()) jn["error"] = n.error;
    nodes[id] = std::move(jn);
  }
  auto artifacts = json::array();
  for (const auto& a : record.artifacts) {
    json ja = {{"id", a.id}, {"kind", a.kind}, {"node", a.node}, {"port", a.port},
               {"size", a.bytes.size()}};
    if (include_bytes) ja["bytes"] = a.bytes;
    artifacts.push_back(std::move(ja));
  }
  return {{"run_id", record.run_id},
          {"workflow_id", record.workflow_id},
          {"seed", record.seed},
          {"status", to_string(record.status)},
          {"events", events},
          {"nodes", nodes},
          {"artifacts", artifacts},
          {"assignment", record.assignment},
          {"slots", record.slots}};
}

ExecutionRecord record_from_json(const nlohmann::json& j) {
  ExecutionRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.workflow_id = j.at("workflow_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = enum_field(j, "status", kRunStatuses);
  for (const auto& je : j.at("events")) {
    ExecutionEvent e;
    e.seq = je.at("seq").get<std::uint64_t>();
    e.time = je.at("time").get<double>();
    e.node = je.at("node").get<std::string>();
    e.type = enum_field(je, "type", kEventTypes);
    e.resource = je.value("resource", "");
    e.reason = je.value("reason", "");
    r.events.push_back(std::move(e));
  }
  for (const auto& [id, jn] : j.at("nodes").items()) {
    NodeStatus n;
    n.state = enum_field(jn, "state", kNodeStates);
    n.resource = jn.value("resource", "");
    n.error = jn.value("error", "");
    n.failed_by_dependency = jn.value("failed_by_dependency", false);
    r.nodes[id] = std::move(n);
  }
  for (const auto& ja : j.at("artifacts")) {
    Artifact a;
    a.id = ja.at("id").get<std::string>();
    a.kind = ja.at("kind").get<std::string>();
    a.node = ja.at("node").get<std::string>();
    a.port = ja.at("port").get<std::string>();
    a.bytes = ja.value("bytes", "");
    a.run_id = r.run_id;
    r.artifacts.push_back(std::move(a));
  }
  r.assignment = j.at("assignment").get<std::map<std::string, std::string>>();
  r.slots = j.at("slots").get<std::map<std::string, int>>();
  return r;
}

// Fixed-size pool running adapter bodies.
class Executor::WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers) {
    workers = std::max<std::size_t>(workers, 1);
    for (std::size_t i = 0; i < workers; ++i) {
      threads_.emplace_back([this] { loop(); });
    }
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::future<Outcome> post(std::function<Outcome()> job) {
    auto task = std::make_shared<std::packaged_task<Outcome()>>(std::move(job));
    auto future = task->get_future();
    {
      std::lock_guard lock(mutex_);
      queue_.emplace_back([task] { (*task)(); });
    }
    cv_.notify_one();
    return future;
  }

 private:
  void loop() {
    while (true) {
      std::function<void()> job;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      job();
    }
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  std::vector<std::thread> threads_;
  bool stopping_ = false;
};

struct Executor::Run {
  std::mutex mutex;
  std::condition_variable cv;
  ExecutionRecord record;
  bool held = false;
  bool cancel = false;
  Workflow wf;
  ExecutionPlan plan;
  InputMap inputs;
  std::thread driver;
};

Executor::Executor(std::shared_ptr<const AdapterRegistry> adapters, ExecutorOptions options)
    : adapters_(std::move(adapters)),
      options_(std::move(options)),
      pool_(std::make_unique<WorkerPool>(options_.worker_limit)) {}

Executor::~Executor() {
  std::vector<std::shared_ptr<Run>> runs;
  {
    std::lock_guard lock(mutex_);
    for (auto& [_, run] : runs_) runs.push_back(run);
  }
  for (auto& run : runs) {
    {
      std::lock_guard lock(run->mutex);
      if (run->held) {
        run->held = false;
        run->cancel = true;
      }
    }
    run->cv.notify_all();
    if (run->driver.joinable()) run->driver.join();
  }
}

std::string Executor::submit(const ExecutionPlan& plan, const Workflow& wf, InputMap inputs,
                             std::uint64_t seed, SubmitOptions options) {
  auto report = validate_workflow(wf);
  if (report.has_errors()) {
    throw Error(ErrorCode::kInvalidWorkflow, "workflow '" + wf.id + "' is not valid", to_json(report));
  }
  std::map<std::string, int> slots;
  for (const auto& r : plan.pool) slots[r.id] = r.slots;
  for (const auto& n : wf.nodes) {
    auto it = plan.assignment.find(n.id);
    if (it == plan.assignment.end() || !slots.contains(it->second)) {
      throw Error(ErrorCode::kBadParameter, "plan does not assign node '" + n.id + "' to a pool resource");
    }
  }
  std::vector<std::string> missing;
  for (const auto& n : wf.nodes) {
    if (!adapters_->find(n.tool)) missing.push_back(n.tool);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw Error(ErrorCode::kAdapterMissing, "no adapter registered for tool '" + missing.front() + "'",
                {{"tools", missing}});
  }
  std::set<PortRef> linked;
  for (const auto& l : wf.links) linked.insert(l.to);
  for (const auto& n : wf.nodes) {
    for (const auto& p : n.in_ports) {
      PortRef ref{n.id, p.name};
      if (!linked.contains(ref) && !inputs.contains(ref)) {
        throw Error(ErrorCode::kBadParameter, "no input supplied for in-port " + to_string(ref),
                    {{"in_port", to_string(ref)}});
      }
    }
  }

  auto run = std::make_shared<Run>();
  run->wf = wf;
  run->plan = plan;
  run->inputs = std::move(inputs);
  run->held = options.hold;
  run->record.workflow_id = wf.id;
  run->record.seed = seed;
  run->record.assignment = plan.assignment;
  run->record.slots = slots;
  for (const auto& n : wf.nodes) run->record.nodes[n.id].resource = plan.assignment.at(n.id);

  std::string run_id;
  {
    std::lock_guard lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "run-%06llu", static_cast<unsigned long long>(next_run_++));
    run_id = buf;
    run->record.run_id = run_id;
    runs_[run_id] = run;
  }
  run->driver = std::thread([this, run] { drive(run); });
  return run_id;
}

void Executor::release(const std::string& run_id) {
  auto run = find_run(run_id);
  {
    std::lock_guard lock(run->mutex);
    run->held = false;
  }
  run->cv.notify_all();
}

ExecutionRecord Executor::wait(const std::string& run_id) {
  auto run = find_run(run_id);
  std::unique_lock lock(run->mutex);
  run->cv.wait(lock, [&] { return run->record.finalized(); });
  return run->record;
}

ExecutionRecord Executor::run_status(const std::string& run_id) const {
  auto run = find_run(run_id);
  std::lock_guard lock(run->mutex);
  return run->record;
}

bool Executor::cancel(const std::string& run_id) {
  auto run = find_run(run_id);
  {
    std::lock_guard lock(run->mutex);
    if (run->record.finalized()) return false;
    run->cancel = true;
    run->held = false;
  }
  run->cv.notify_all();
  return true;
}

ExecutionRecord Executor::execute(const ExecutionPlan& plan, const Workflow& wf, InputMap inputs,
                                  std::uint64_t seed) {
  return wait(submit(plan, wf, std::move(inputs), seed));
}

void Executor::adopt(ExecutionRecord record) {
  auto run = std::make_shared<Run>();
  std::lock_guard lock(mutex_);
  if (record.run_id.rfind("run-", 0) == 0) {
    std::uint64_t n = 0;
    const auto* begin = record.run_id.data() + 4;
    std::from_chars(begin, record.run_id.data() + record.run_id.size(), n);
    next_run_ = std::max(next_run_, n + 1);
  }
  auto id = record.run_id;
  run->record = std::move(record);
  runs_[id] = std::move(run);
}

std::vector<std::string> Executor::run_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : runs_) out.push_back(id);
  return out;
}

std::shared_ptr<Executor::Run> Executor::find_run(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) {
    throw Error(ErrorCode::kUnknownRun, "run '" + run_id + "' does not exist", {{"run_id", run_id}});
  }
  return it->second;
}

void Executor::drive(const std::shared_ptr<Run>& run) {
  {
    std::unique_lock lock(run->mutex);
    run->cv.wait(lock, [&] { return !run->held; });
  }
  const Workflow& wf = run->wf;
  const auto order = topo_order(wf);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;

  std::vector<std::set<std::size_t>> preds(order.size());
  std::vector<std::set<std::size_t>> succs(order.size());
  std::map<PortRef, PortRef> producer;
  for (const auto& l : wf.links) {
    preds[index[l.to.node]].insert(index[l.from.node]);
    succs[index[l.from.node]].insert(index[l.to.node]);
    producer[l.to] = l.from;
  }
  std::map<std::string, double> speed;
  std::map<std::string, int> busy;
  for (const auto& r : run->plan.pool) speed[r.id] = r.speed_factor;

  std::uint64_t seq = 0;
  double now = 0.0;
  std::map<PortRef, const Artifact*> produced;
  std::vector<NodeState> state(order.size(), NodeState::kPending);

  auto emit = [&](std::size_t i, EventType type, std::string reason = {}) {
    const auto& id = order[i];
    std::lock_guard lock(run->mutex);
    auto& status = run->record.nodes[id];
    run->record.events.push_back({++seq, now, id, type, status.resource, reason});
    switch (type) {
      case EventType::kQueued: status.state = NodeState::kQueued; break;
      case EventType::kStarted: status.state = NodeState::kRunning; break;
      case EventType::kFinished: status.state = NodeState::kFinished; break;
      case EventType::kFailed: status.state = NodeState::kFailed; break;
    }
    if (type == EventType::kFailed) status.error = std::move(reason);
    state[i] = status.state;
  };

  {
    std::lock_guard lock(run->mutex);
    run->record.status = RunStatus::kRunning;
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (preds[i].empty()) {
      emit(i, EventType::kQueued);
      ready.insert(i);
    }
  }

  std::set<std::pair<double, std::size_t>> running;
  std::map<std::size_t, std::future<Outcome>> jobs;

  while (true) {
    bool cancelled = false;
    {
      std::lock_guard lock(run->mutex);
      cancelled = run->cancel;
    }
    if (!cancelled) {
      for (auto it = ready.begin(); it != ready.end();) {
        const std::size_t i = *it;
        const CrateNode& node = *wf.find_node(order[i]);
        const auto& resource = run->plan.assignment.at(node.id);
        if (busy[resource] >= run->record.slots.at(resource)) {
          ++it;
          continue;
        }
        ++busy[resource];
        emit(i, EventType::kStarted);

        AdapterRequest request;
        request.node_id = node.id;
        request.out_ports = node.out_ports;
        request.parameters = node.parameters;
        request.script = node.script;
        request.seed = node_seed(run->record.seed, node.id);
        for (const auto& p : node.in_ports) {
          PortRef ref{node.id, p.name};
          auto src = producer.find(ref);
          const std::string& bytes =
              src != producer.end() ? produced.at(src->second)->bytes : run->inputs.at(ref);
          request.inputs.push_back({p.name, p.kind, bytes});
        }
        auto adapter = adapters_->find(node.tool);
        jobs[i] = pool_->post([adapter, request = std::move(request)]() {
          Outcome out;
          try {
            out.outputs = adapter->run(request);
            out.ok = true;
          } catch (const std::exception& e) {
            out.error = e.what();
          }
          return out;
        });
        running.insert({now + nominal_cost(node) * speed.at(resource), i});
        it = ready.erase(it);
      }
    }
    if (running.empty()) break;

    auto [finish, i] = *running.begin();
    running.erase(running.begin());
    now = finish;
    Outcome outcome = jobs.at(i).get();
    jobs.erase(i);
    const CrateNode& node = *wf.find_node(order[i]);
    --busy[run->plan.assignment.at(node.id)];

    if (outcome.ok) {
      for (const auto& p : node.out_ports) {
        if (!outcome.outputs.contains(p.name)) {
          outcome.ok = false;
          outcome.error = "adapter '" + node.tool + "' produced nothing for out-port '" + p.name + "'";
          break;
        }
      }
    }
    if (outcome.ok) {
      std::vector<Artifact> made;
      for (const auto& p : node.out_ports) {
        auto& bytes = outcome.outputs.at(p.name);
        made.push_back({content_hash(bytes), p.kind, std::move(bytes), run->record.run_id, node.id, p.name});
      }
      for (const auto& a : made) stage(a);
      {
        std::lock_guard lock(run->mutex);
        for (auto& a : made) run->record.artifacts.push_back(std::move(a));
        // Pointers into the record are refreshed because push_back may reallocate.
        produced.clear();
        for (const auto& a : run->record.artifacts) produced[{a.node, a.port}] = &a;
      }
      emit(i, EventType::kFinished);
      for (auto s : succs[i]) {
        if (state[s] != NodeState::kPending) continue;
        bool all_done = std::all_of(preds[s].begin(), preds[s].end(),
                                    [&](std::size_t p) { return state[p] == NodeState::kFinished; });
        if (all_done) {
          emit(s, EventType::kQueued);
          ready.insert(s);
        }
      }
    } else {
      emit(i, EventType::kFailed, "ADAPTER_FAILURE: " + outcome.error);
      std::deque<std::size_t> frontier(succs[i].begin(), succs[i].end());
      while (!frontier.empty()) {
        auto d = frontier.front();
        frontier.pop_front();
        if (state[d] == NodeState::kFailed) continue;
        emit(d, EventType::kFailed, "upstream node '" + node.id + "' failed");
        {
          std::lock_guard lock(run->mutex);
          run->record.nodes[order[d]].failed_by_dependency = true;
        }
        frontier.insert(frontier.end(), succs[d].begin(), succs[d].end());
      }
    }
  }

  ExecutionRecord final_copy;
  {
    std::lock_guard lock(run->mutex);
    auto& rec = run->record;
    bool any_failed = std::any_of(rec.nodes.begin(), rec.nodes.end(), [](const auto& kv) {
      return kv.second.state == NodeState::kFailed;
    });
    if (run->cancel) {
      rec.status = RunStatus::kCancelled;
    } else {
      rec.status = any_failed ? RunStatus::kFailed : RunStatus::kSucceeded;
    }
    final_copy = rec;
  }
  persist(final_copy);
  run->cv.notify_all();
}

void Executor::stage(const Artifact& artifact) const {
  if (!options_.runs_dir) return;
  auto dir = *options_.runs_dir / artifact.run_id / artifact.node;
  fs::create_directories(dir);
  std::ofstream(dir / artifact.port, std::ios::binary) << artifact.bytes;
}

void Executor::persist(const ExecutionRecord& record) const {
  if (!options_.runs_dir) return;
  auto dir = *options_.runs_dir / record.run_id;
  fs::create_directories(dir);
  auto tmp = dir / "record.json.tmp";
  std::ofstream(tmp, std::ios::binary) << canonical_dump(to_json(record));
  fs::rename(tmp, dir / "record.json");
}

std::vector<ExecutionRecord> load_records(const fs::path& runs_dir) {
  std::vector<ExecutionRecord> out;
  if (!fs::is_directory(runs_dir)) return out;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "record.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    std::ifstream in(dir / "record.json", std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto record = record_from_json(parse_json(buf.str()));
    for (auto& a : record.artifacts) {
      std::ifstream file(dir / a.node / a.port, std::ios::binary);
      std::ostringstream bytes;
      bytes << file.rdbuf();
      a.bytes = bytes.str();
    }
    out.push_back(std::move(record));
  }
  return out;
}

}  // namespace coursegate
