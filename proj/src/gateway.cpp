#include "coursegate/gateway.hpp"

#include <fstream>
#include <sstream>

#include "coursegate/canonical_json.hpp"
#include "coursegate/error.hpp"

namespace coursegate {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Runs `fn`, turning shape errors from the JSON readers into BAD_REQUEST.
template <typename Fn>
auto shaped(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadRequest, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::kBadRequest, e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void probe_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto probe = dir / ".write-probe";
  {
    std::ofstream out(probe, std::ios::binary);
    out << "ok";
    if (ec || !out) {
      throw Error(ErrorCode::kDataDirUnwritable, "data directory '" + dir.string() + "' is not writable",
                  {{"data_dir", dir.string()}});
    }
  }
  fs::remove(probe, ec);
}

std::pair<CourseTrack, TrackConstraints> track_and_constraints(const json& body) {
  return shaped([&] {
    if (!body.is_object()) throw std::invalid_argument("body must be a JSON object");
    const json& jt = body.contains("track") ? body.at("track") : body;
    TrackConstraints c;
    if (body.contains("constraints") && !body.at("constraints").is_null()) {
      c = constraints_from_json(body.at("constraints"));
    }
    return std::pair{track_from_json(jt), c};
  });
}

}  // namespace

json parse_body(std::string_view text) {
  return shaped([&] { return parse_json(text); });
}

Gateway::Gateway(GatewayConfig config) : config_(std::move(config)) {
  probe_writable(config_.data_dir);
  probe_writable(config_.data_dir / "runs");
  auto repo = config_.data_dir / "repository.json";
  if (fs::exists(repo)) {
    registry_.import_repository(read_file(repo));
  } else {
    persist();
  }
  auto adapters = std::make_shared<const AdapterRegistry>(AdapterRegistry::with_builtins(config_.enable_exec));
  executor_ = std::make_unique<Executor>(
      adapters, ExecutorOptions{config_.worker_limit, config_.data_dir / "runs"});
  for (auto& record : load_records(config_.data_dir / "runs")) executor_->adopt(std::move(record));
}

void Gateway::persist() {
  auto path = config_.data_dir / "repository.json";
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << registry_.export_repository();
    if (!out) {
      throw Error(ErrorCode::kDataDirUnwritable, "cannot write " + tmp.string(),
                  {{"data_dir", config_.data_dir.string()}});
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kDataDirUnwritable, "cannot replace " + path.string(),
                {{"data_dir", config_.data_dir.string()}});
  }
}

void Gateway::flush() {
  std::lock_guard lock(write_mutex_);
  persist();
}

ModuleId Gateway::add_module(const json& body) {
  auto meta = shaped([&] { return module_from_json(body); });
  std::lock_guard lock(write_mutex_);
  auto id = registry_.register_module(std::move(meta));
  persist();
  return id;
}

ModuleMeta Gateway::module(const ModuleId& id) const {
  auto meta = registry_.get(id);
  if (!meta) throw Error(ErrorCode::kUnknownModule, "module '" + id + "' is not registered", {{"id", id}});
  return *meta;
}

RatingAggregate Gateway::rate(const ModuleId& id, int stars) {
  std::lock_guard lock(write_mutex_);
  auto out = registry_.rate(id, stars);
  persist();
  return out;
}

ImportReport Gateway::import_archive(std::string_view bytes) {
  std::lock_guard lock(write_mutex_);
  auto report = registry_.import_repository(bytes);
  persist();
  return report;
}

std::string Gateway::add_workflow(const json& body) {
  auto wf = shaped([&] { return workflow_from_json(body); });
  std::lock_guard lock(write_mutex_);
  auto id = wf.id;
  registry_.register_workflow(std::move(wf));
  persist();
  return id;
}

Workflow Gateway::workflow(const std::string& id) const {
  auto wf = registry_.get_workflow(id);
  if (!wf) throw Error(ErrorCode::kNotFound, "workflow '" + id + "' is not registered", {{"id", id}});
  return *wf;
}

ValidationReport Gateway::validate(const Workflow& wf) const {
  auto tools = executor_->adapters().names();
  return validate_workflow(wf, &tools);
}

PrereqGraph Gateway::graph() const { return build_graph(registry_.modules()); }

TrackReport Gateway::check(const json& body) const {
  auto [track, constraints] = track_and_constraints(body);
  return check_track(track, graph(), constraints);
}

CourseAggregate Gateway::aggregate(const json& body) const {
  auto [track, constraints] = track_and_constraints(body);
  std::map<ModuleId, ModuleMeta> modules;
  for (auto& m : registry_.modules()) {
    auto id = m.id;
    modules.emplace(std::move(id), std::move(m));
  }
  return coursegate::aggregate(track, modules);
}

CourseTrack Gateway::plan(const json& body) const {
  auto [target, constraints] = shaped([&] {
    if (!body.is_object()) throw std::invalid_argument("body must be a JSON object");
    TrackConstraints c;
    if (body.contains("constraints") && !body.at("constraints").is_null()) {
      c = constraints_from_json(body.at("constraints"));
    }
    return std::pair{body.at("target").get<std::string>(), c};
  });
  return plan_track(target, graph(), constraints);
}

RunRequest Gateway::run_request(const json& body) const {
  if (!body.is_object()) throw Error(ErrorCode::kBadRequest, "body must be a JSON object");
  RunRequest req;
  const json& jw = shaped([&]() -> const json& { return body.at("workflow"); });
  if (jw.is_string()) {
    req.workflow = workflow(jw.get<std::string>());
  } else {
    req.workflow = shaped([&] { return workflow_from_json(jw); });
  }
  if (body.contains("pool")) {
    req.pool = pool_from_json(body.at("pool"));
  } else {
    req.pool = {Resource{"pc-1", ResourceKind::kPc, 1, 1.0}};
  }
  if (body.contains("policy")) {
    auto name = shaped([&] { return body.at("policy").get<std::string>(); });
    auto policy = parse_policy(name);
    if (!policy) throw Error(ErrorCode::kBadParameter, "unknown policy '" + name + "'", {{"policy", name}});
    req.policy = *policy;
  }
  shaped([&] {
    if (body.contains("seed")) req.seed = body.at("seed").get<std::uint64_t>();
    if (body.contains("inputs")) {
      for (const auto& [node, ports] : body.at("inputs").items()) {
        for (const auto& [port, text] : ports.items()) {
          req.inputs[PortRef{node, port}] = text.get<std::string>();
        }
      }
    }
    return 0;
  });
  return req;
}

std::string Gateway::submit(const RunRequest& request, SubmitOptions options) {
  auto plan = plan_execution(request.workflow, request.pool, request.policy);
  return executor_->submit(plan, request.workflow, request.inputs, request.seed, options);
}

ExecutionRecord Gateway::run(const std::string& run_id) const { return executor_->run_status(run_id); }

std::string Gateway::artifact(const std::string& run_id, const std::string& node,
                              const std::string& port) const {
  auto record = executor_->run_status(run_id);
  const auto* a = record.find_artifact(node, port);
  if (!a) {
    throw Error(ErrorCode::kNotFound, "run '" + run_id + "' has no artifact at " + node + "." + port,
                {{"run_id", run_id}, {"node", node}, {"port", port}});
  }
  return a->bytes;
}

}  // namespace coursegate
