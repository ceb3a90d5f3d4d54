#include "coursegate/workflow.hpp"

#include <algorithm>
#include <queue>

#include "coursegate/canonical_json.hpp"
#include "coursegate/error.hpp"

namespace coursegate {
namespace {

using nlohmann::json;

const Port* find_port(const std::vector<Port>& ports, std::string_view name) noexcept {
  for (const auto& p : ports) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

// Adjacency over well-formed links only (both endpoints present).
struct LinkGraph {
  std::map<std::string, std::set<std::string>> succ;
  std::map<std::string, int> indegree;
};

LinkGraph link_graph(const Workflow& wf) {
  LinkGraph g;
  for (const auto& n : wf.nodes) {
    g.succ[n.id];
    g.indegree[n.id];
  }
  for (const auto& l : wf.links) {
    if (!g.succ.contains(l.from.node) || !g.succ.contains(l.to.node)) continue;
    if (g.succ[l.from.node].insert(l.to.node).second) ++g.indegree[l.to.node];
  }
  return g;
}

// Returns one cycle as a node sequence (first == last), or empty if acyclic.
std::vector<std::string> find_cycle(const LinkGraph& g) {
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> cycle;

  auto dfs = [&](auto&& self, const std::string& u) -> bool {
    color[u] = 1;
    stack.push_back(u);
    for (const auto& v : g.succ.at(u)) {
      if (color[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        cycle.push_back(v);
        return true;
      }
      if (color[v] == 0 && self(self, v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (const auto& [id, _] : g.succ) {
    if (color[id] == 0 && dfs(dfs, id)) return cycle;
  }
  return {};
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedWorkflow, "malformed workflow: " + what);
}

std::string require_string(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    malformed(std::string("missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::vector<Port> ports_from_json(const json& j, const char* key) {
  std::vector<Port> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) malformed(std::string(key) + " must be an array");
  for (const auto& p : j.at(key)) {
    out.push_back({require_string(p, "name"), require_string(p, "kind")});
  }
  return out;
}

json ports_to_json(const std::vector<Port>& ports) {
  auto out = json::array();
  for (const auto& p : ports) out.push_back({{"name", p.name}, {"kind", p.kind}});
  return out;
}

PortRef ref_from_json(const json& j) {
  return {require_string(j, "node"), require_string(j, "port")};
}

}  // namespace

bool is_valid_token(std::string_view token) noexcept {
  if (token.empty() || token.size() > 128) return false;
  auto alnum = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  };
  if (!alnum(token.front())) return false;
  return std::all_of(token.begin(), token.end(), [&](char c) {
    return alnum(c) || c == '_' || c == '.' || c == '-';
  });
}

const Port* CrateNode::find_in(std::string_view name) const noexcept {
  return find_port(in_ports, name);
}

const Port* CrateNode::find_out(std::string_view name) const noexcept {
  return find_port(out_ports, name);
}

std::string to_string(const PortRef& ref) { return ref.node + "." + ref.port; }

const CrateNode* Workflow::find_node(std::string_view node_id) const noexcept {
  for (const auto& n : nodes) {
    if (n.id == node_id) return &n;
  }
  return nullptr;
}

ValidationReport validate_workflow(const Workflow& wf,
                                   const std::set<std::string>* known_tools) {
  ValidationReport report;
  if (!is_valid_token(wf.id)) {
    report.error("INVALID_TOKEN", "workflow id '" + wf.id + "' is not a valid token", "id");
  }

  std::set<std::string> seen;
  for (const auto& n : wf.nodes) {
    const std::string field = "nodes." + n.id;
    if (!is_valid_token(n.id)) {
      report.error("INVALID_TOKEN", "node id '" + n.id + "' is not a valid token", field);
    }
    if (!seen.insert(n.id).second) {
      report.error("DUPLICATE_NODE_ID", "node id '" + n.id + "' appears more than once", field);
    }
    if (n.tool.empty()) {
      report.error("EMPTY_TOOL", "node '" + n.id + "' names no tool", field);
    } else if (known_tools != nullptr && !known_tools->contains(n.tool)) {
      report.warning("UNKNOWN_TOOL", "tool '" + n.tool + "' has no registered adapter", field);
    }
    for (const auto* ports : {&n.in_ports, &n.out_ports}) {
      std::set<std::string> names;
      for (const auto& p : *ports) {
        if (!is_valid_token(p.name) || !is_valid_token(p.kind)) {
          report.error("INVALID_TOKEN", "port '" + p.name + "' of node '" + n.id +
                                            "' has an invalid name or kind", field);
        }
        if (!names.insert(p.name).second) {
          report.error("DUPLICATE_PORT", "node '" + n.id + "' declares port '" + p.name +
                                             "' twice in one direction", field);
        }
      }
    }
    if (n.script && n.script->content.size() > kMaxScriptBytes) {
      report.error("SCRIPT_TOO_LARGE", "script of node '" + n.id + "' exceeds 1 MiB", field);
    }
  }

  std::set<PortRef> fed;
  for (const auto& l : wf.links) {
    const std::string field = "links." + to_string(l.from) + "->" + to_string(l.to);
    const auto* src = wf.find_node(l.from.node);
    const auto* dst = wf.find_node(l.to.node);
    const Port* out = src ? src->find_out(l.from.port) : nullptr;
    const Port* in = dst ? dst->find_in(l.to.port) : nullptr;
    if (out == nullptr || in == nullptr) {
      report.error("DANGLING_ENDPOINT",
                   "link endpoint " + to_string(out == nullptr ? l.from : l.to) + " does not exist",
                   field);
      continue;
    }
    if (out->kind != in->kind) {
      report.error("PORT_KIND_MISMATCH", "link carries '" + out->kind + "' into an in-port of kind '" +
                                             in->kind + "'", field);
    }
    if (!fed.insert(l.to).second) {
      report.error("DUPLICATE_INPUT_LINK", "in-port " + to_string(l.to) + " has more than one producer",
                   field);
    }
  }

  if (seen.size() == wf.nodes.size()) {
    auto cycle = find_cycle(link_graph(wf));
    if (!cycle.empty()) {
      std::string path;
      for (const auto& id : cycle) path += (path.empty() ? "" : " -> ") + id;
      report.error("CYCLE", "links form a cycle: " + path, "links");
    }
  }
  return report;
}

std::vector<std::vector<std::string>> topo_layers(const Workflow& wf) {
  auto report = validate_workflow(wf);
  if (report.has_errors()) {
    throw Error(ErrorCode::kInvalidWorkflow, "workflow '" + wf.id + "' is not valid",
                to_json(report));
  }
  auto g = link_graph(wf);
  std::map<std::string, std::size_t> depth;
  std::queue<std::string> ready;
  for (const auto& [id, deg] : g.indegree) {
    if (deg == 0) ready.push(id);
    depth[id] = 0;
  }
  auto indegree = g.indegree;
  std::size_t max_depth = 0;
  while (!ready.empty()) {
    auto u = ready.front();
    ready.pop();
    max_depth = std::max(max_depth, depth[u]);
    for (const auto& v : g.succ[u]) {
      depth[v] = std::max(depth[v], depth[u] + 1);
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  std::vector<std::vector<std::string>> layers;
  if (wf.nodes.empty()) return layers;
  layers.resize(max_depth + 1);
  for (const auto& [id, d] : depth) layers[d].push_back(id);  // map order keeps ids sorted
  return layers;
}

std::vector<std::string> topo_order(const Workflow& wf) {
  std::vector<std::string> order;
  for (auto& layer : topo_layers(wf)) {
    order.insert(order.end(), layer.begin(), layer.end());
  }
  return order;
}

Workflow derive_subset(const Workflow& wf, const std::set<std::string>& keep) {
  for (const auto& id : keep) {
    if (wf.find_node(id) == nullptr) {
      throw Error(ErrorCode::kUnknownNode, "node '" + id + "' is not part of workflow '" + wf.id + "'",
                  {{"node", id}});
    }
  }
  std::vector<Link> sorted_links = wf.links;
  std::sort(sorted_links.begin(), sorted_links.end());
  for (const auto& l : sorted_links) {
    if (keep.contains(l.to.node) && !keep.contains(l.from.node)) {
      throw Error(ErrorCode::kBrokenDependency,
                  "in-port " + to_string(l.to) + " would lose its producer " + to_string(l.from),
                  {{"in_port", to_string(l.to)}, {"producer", to_string(l.from)}});
    }
  }
  Workflow out = wf;
  out.nodes.clear();
  out.links.clear();
  for (const auto& n : wf.nodes) {
    if (keep.contains(n.id)) out.nodes.push_back(n);
  }
  for (const auto& l : wf.links) {
    if (keep.contains(l.from.node) && keep.contains(l.to.node)) out.links.push_back(l);
  }
  return out;
}

namespace {

CrateNode& node_or_throw(Workflow& wf, std::string_view node_id) {
  for (auto& n : wf.nodes) {
    if (n.id == node_id) return n;
  }
  throw Error(ErrorCode::kUnknownNode, "node '" + std::string(node_id) + "' is not part of workflow '" +
                                           wf.id + "'",
              {{"node", node_id}});
}

}  // namespace

Workflow set_parameters(Workflow wf, std::string_view node_id, ParameterSet params) {
  node_or_throw(wf, node_id).parameters = std::move(params);
  return wf;
}

Workflow attach_script(Workflow wf, std::string_view node_id, ScriptBinding script) {
  node_or_throw(wf, node_id).script = std::move(script);
  return wf;
}

bool structurally_equal(const Workflow& a, const Workflow& b) {
  auto ja = to_json(a);
  auto jb = to_json(b);
  return ja.at("nodes") == jb.at("nodes") && ja.at("links") == jb.at("links");
}

nlohmann::json to_json(const Workflow& wf) {
  json j = wf.extra.is_object() ? wf.extra : json::object();
  j["id"] = wf.id;
  j["title"] = wf.title;
  if (wf.owning_module) {
    j["owning_module"] = *wf.owning_module;
  } else {
    j.erase("owning_module");
  }

  std::vector<const CrateNode*> nodes;
  for (const auto& n : wf.nodes) nodes.push_back(&n);
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const CrateNode* x, const CrateNode* y) { return x->id < y->id; });
  auto jnodes = json::array();
  for (const auto* n : nodes) {
    json jn = {{"id", n->id},
               {"tool", n->tool},
               {"in_ports", ports_to_json(n->in_ports)},
               {"out_ports", ports_to_json(n->out_ports)},
               {"parameters", n->parameters}};
    if (n->script) {
      jn["script"] = {{"content", n->script->content},
                      {"role", n->script->role == ScriptRole::kInput ? "input" : "output"}};
    }
    jnodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(jnodes);

  auto links = wf.links;
  std::sort(links.begin(), links.end());
  auto jlinks = json::array();
  for (const auto& l : links) {
    jlinks.push_back({{"from", {{"node", l.from.node}, {"port", l.from.port}}},
                      {"to", {{"node", l.to.node}, {"port", l.to.port}}}});
  }
  j["links"] = std::move(jlinks);
  return j;
}

Workflow workflow_from_json(const nlohmann::json& j) {
  if (!j.is_object()) malformed("top level must be an object");
  Workflow wf;
  wf.id = require_string(j, "id");
  if (j.contains("title")) wf.title = require_string(j, "title");
  if (j.contains("owning_module") && !j.at("owning_module").is_null()) {
    wf.owning_module = require_string(j, "owning_module");
  }
  if (j.contains("nodes")) {
    if (!j.at("nodes").is_array()) malformed("nodes must be an array");
    for (const auto& jn : j.at("nodes")) {
      CrateNode n;
      n.id = require_string(jn, "id");
      n.tool = require_string(jn, "tool");
      n.in_ports = ports_from_json(jn, "in_ports");
      n.out_ports = ports_from_json(jn, "out_ports");
      if (jn.contains("parameters")) {
        const auto& params = jn.at("parameters");
        if (!params.is_object()) malformed("parameters must be an object");
        for (const auto& [key, value] : params.items()) {
          if (value.is_string()) {
            n.parameters[key] = value.get<std::string>();
          } else if (value.is_number_integer()) {
            n.parameters[key] = value.dump();
          } else if (value.is_number_float()) {
            n.parameters[key] = format_decimal(value.get<double>());
          } else {
            malformed("parameter '" + key + "' must be a string or number");
          }
        }
      }
      if (jn.contains("script") && !jn.at("script").is_null()) {
        const auto& js = jn.at("script");
        ScriptBinding s;
        s.content = require_string(js, "content");
        auto role = js.contains("role") ? require_string(js, "role") : std::string("input");
        if (role == "input") {
          s.role = ScriptRole::kInput;
        } else if (role == "output") {
          s.role = ScriptRole::kOutput;
        } else {
          malformed("script role must be input or output");
        }
        n.script = std::move(s);
      }
      wf.nodes.push_back(std::move(n));
    }
  }
  if (j.contains("links")) {
    if (!j.at("links").is_array()) malformed("links must be an array");
    for (const auto& jl : j.at("links")) {
      if (!jl.is_object() || !jl.contains("from") || !jl.contains("to")) {
        malformed("link needs from and to");
      }
      wf.links.push_back({ref_from_json(jl.at("from")), ref_from_json(jl.at("to"))});
    }
  }
  static const std::set<std::string> kKnown = {"id", "title", "owning_module", "nodes", "links"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) wf.extra[key] = value;
  }
  return wf;
}

std::string serialize_workflow(const Workflow& wf) { return canonical_dump(to_json(wf)); }

Workflow deserialize_workflow(std::string_view bytes) {
  json j;
  try {
    j = parse_json(bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedWorkflow, std::string("malformed workflow: ") + e.what());
  }
  return workflow_from_json(j);
}

}  // namespace coursegate
