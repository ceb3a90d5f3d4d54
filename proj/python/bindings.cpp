// Python bindings. Structured values cross the boundary as canonical JSON
// text; the coursegate package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coursegate/canonical_json.hpp"
#include "coursegate/curriculum.hpp"
#include "coursegate/error.hpp"
#include "coursegate/executor.hpp"
#include "coursegate/registry.hpp"
#include "coursegate/scale.hpp"

namespace py = pybind11;
using namespace coursegate;
using nlohmann::json;

namespace {

std::vector<ModuleMeta> modules_from(const std::string& text) {
  std::vector<ModuleMeta> out;
  for (const auto& jm : parse_json(text)) out.push_back(module_from_json(jm));
  return out;
}

TrackConstraints constraints_from(const std::string& text) {
  return text.empty() ? TrackConstraints{} : constraints_from_json(parse_json(text));
}

SearchQuery query_from(const std::string& text) {
  SearchQuery q;
  auto j = parse_json(text);
  if (j.contains("keywords")) q.keywords = j["keywords"].get<std::vector<std::string>>();
  if (j.contains("category_prefix")) q.category_prefix = j["category_prefix"].get<std::string>();
  if (j.contains("scale")) q.scale = parse_scale(j["scale"].get<std::string>());
  if (j.contains("language")) q.language = j["language"].get<std::string>();
  if (j.contains("max_complexity")) q.max_complexity = j["max_complexity"].get<int>();
  return q;
}

}  // namespace

PYBIND11_MODULE(_coursegate, m) {
  m.doc() = "coursegate core bindings";

  static py::exception<Error> error_type(m, "CoursegateError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      auto details = e.details().is_null() ? std::string("null") : canonical_dump(e.details());
      PyErr_SetObject(error_type.ptr(),
                      py::make_tuple(std::string(e.code_name()), e.what(), details).ptr());
    }
  });

  m.def("classify_scale", [](std::int64_t minutes) {
    auto c = classify_scale_checked(Duration::from_minutes(minutes));
    return py::make_tuple(std::string(to_string(c.level)), c.oversize);
  });
  m.def("parse_duration", [](const std::string& text) { return parse_duration(text).minutes; });

  m.def("validate_meta", [](const std::string& module, const std::vector<std::string>& known) {
    return canonical_dump(to_json(validate_meta(module_from_json(parse_json(module)), {known.begin(), known.end()})));
  });
  m.def("normalize_module", [](const std::string& module) {
    return canonical_dump(to_json(module_from_json(parse_json(module))));
  });

  py::class_<Registry>(m, "Registry")
      .def(py::init<>())
      .def(py::init<std::string>(), py::arg("created_at"))
      .def("register_module",
           [](Registry& r, const std::string& module) { return r.register_module(module_from_json(parse_json(module))); })
      .def("get",
           [](const Registry& r, const std::string& id) -> std::optional<std::string> {
             auto meta = r.get(id);
             if (!meta) return std::nullopt;
             return canonical_dump(to_json(*meta));
           })
      .def("modules",
           [](const Registry& r) {
             auto out = json::array();
             for (const auto& meta : r.modules()) out.push_back(to_json(meta));
             return canonical_dump(out);
           })
      .def("search",
           [](const Registry& r, const std::string& query) {
             auto out = json::array();
             for (const auto& meta : r.search(query_from(query))) out.push_back(to_json(meta));
             return canonical_dump(out);
           })
      .def("rate", [](Registry& r, const std::string& id, int stars) { return canonical_dump(to_json(r.rate(id, stars))); })
      .def("register_workflow",
           [](Registry& r, const std::string& wf) { r.register_workflow(deserialize_workflow(wf)); })
      .def("export_repository", &Registry::export_repository)
      .def("import_repository",
           [](Registry& r, const std::string& bytes) { return canonical_dump(to_json(r.import_repository(bytes))); })
      .def("__len__", &Registry::size);

  m.def("plan_track", [](const std::string& target, const std::string& modules, const std::string& constraints) {
    return canonical_dump(to_json(plan_track(target, build_graph(modules_from(modules)), constraints_from(constraints))));
  });
  m.def("check_track", [](const std::string& track, const std::string& modules, const std::string& constraints) {
    return canonical_dump(to_json(check_track(track_from_json(parse_json(track)), build_graph(modules_from(modules)),
                                              constraints_from(constraints))));
  });
  m.def("aggregate", [](const std::string& track, const std::string& modules) {
    std::map<ModuleId, ModuleMeta> by_id;
    for (auto& meta : modules_from(modules)) by_id[meta.id] = meta;
    return canonical_dump(to_json(aggregate(track_from_json(parse_json(track)), by_id)));
  });
  m.def("list_next", [](const std::string& id, const std::string& modules) {
    return list_next(id, build_graph(modules_from(modules)));
  });

  m.def("validate_workflow", [](const std::string& wf) {
    auto tools = AdapterRegistry::with_builtins(true).names();
    return canonical_dump(to_json(validate_workflow(deserialize_workflow(wf), &tools)));
  });
  m.def("topo_layers", [](const std::string& wf) { return topo_layers(deserialize_workflow(wf)); });
  m.def("derive_subset", [](const std::string& wf, const std::vector<std::string>& keep) {
    return serialize_workflow(derive_subset(deserialize_workflow(wf), {keep.begin(), keep.end()}));
  });
  m.def("serialize_workflow", [](const std::string& wf) { return serialize_workflow(deserialize_workflow(wf)); });

  m.def(
      "execute",
      [](const std::string& wf_text, const std::string& pool, const std::string& policy, std::uint64_t seed,
         std::size_t worker_limit) {
        auto wf = deserialize_workflow(wf_text);
        auto p = parse_policy(policy);
        if (!p) throw Error(ErrorCode::kBadParameter, "unknown policy '" + policy + "'");
        auto plan = plan_execution(wf, pool_from_json(parse_json(pool)), *p);
        ExecutionRecord record;
        {
          py::gil_scoped_release release;
          Executor executor(std::make_shared<const AdapterRegistry>(AdapterRegistry::with_builtins()),
                            ExecutorOptions{worker_limit, std::nullopt});
          record = executor.execute(plan, wf, {}, seed);
        }
        return canonical_dump(to_json(record, true));
      },
      py::arg("workflow"), py::arg("pool"), py::arg("policy") = "round_robin", py::arg("seed") = 0,
      py::arg("worker_limit") = 4);

  m.def(
      "lammps_stub",
      [](const std::map<std::string, std::string>& params, std::uint64_t seed) {
        return lammps_stub(ParameterSet(params.begin(), params.end()), seed);
      },
      py::arg("params") = std::map<std::string, std::string>{}, py::arg("seed") = 0);
  m.def("content_hash", [](const py::bytes& data) { return content_hash(std::string(data)); });
}
