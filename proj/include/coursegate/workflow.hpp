#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coursegate/module_meta.hpp"
#include "coursegate/report.hpp"

namespace coursegate {

inline constexpr std::size_t kMaxScriptBytes = 1024 * 1024;

// `[A-Za-z0-9][A-Za-z0-9_.-]*`, at most 128 characters.
bool is_valid_token(std::string_view token) noexcept;

// A named connection point on a crate. Direction is given by whether the port
// sits in a node's in_ports or out_ports list.
struct Port {
  std::string name;
  std::string kind;  // payload kind, matched by string equality

  bool operator==(const Port&) const = default;
};

enum class ScriptRole { kInput, kOutput };

struct ScriptBinding {
  std::string content;
  ScriptRole role = ScriptRole::kInput;

  bool operator==(const ScriptBinding&) const = default;
};

using ParameterSet = std::map<std::string, std::string>;

struct CrateNode {
  std::string id;
  std::string tool;
  std::vector<Port> in_ports;
  std::vector<Port> out_ports;
  std::optional<ScriptBinding> script;
  ParameterSet parameters;

  const Port* find_in(std::string_view name) const noexcept;
  const Port* find_out(std::string_view name) const noexcept;

  bool operator==(const CrateNode&) const = default;
};

struct PortRef {
  std::string node;
  std::string port;

  auto operator<=>(const PortRef&) const = default;
};

std::string to_string(const PortRef& ref);

struct Link {
  PortRef from;  // out-port
  PortRef to;    // in-port

  auto operator<=>(const Link&) const = default;
};

// A DAG of tool crates. Values are immutable in spirit: the editing
// operations below return modified copies.
struct Workflow {
  std::string id;
  std::string title;
  std::vector<CrateNode> nodes;
  std::vector<Link> links;
  std::optional<ModuleId> owning_module;
  nlohmann::json extra = nlohmann::json::object();

  const CrateNode* find_node(std::string_view node_id) const noexcept;

  bool operator==(const Workflow&) const = default;
};

// Structural checks. UNKNOWN_TOOL is only reported (as a warning) when
// `known_tools` is supplied.
ValidationReport validate_workflow(const Workflow& wf,
                                   const std::set<std::string>* known_tools = nullptr);

// Layer k holds the nodes whose longest incoming path has k links; ids are
// sorted inside a layer. Throws INVALID_WORKFLOW if validation fails.
std::vector<std::vector<std::string>> topo_layers(const Workflow& wf);

// Concatenation of topo_layers.
std::vector<std::string> topo_order(const Workflow& wf);

// Induced sub-workflow. Throws UNKNOWN_NODE for ids outside the workflow
// and BROKEN_DEPENDENCY when a kept in-port is fed by a dropped node.
Workflow derive_subset(const Workflow& wf, const std::set<std::string>& keep);

Workflow set_parameters(Workflow wf, std::string_view node_id, ParameterSet params);
Workflow attach_script(Workflow wf, std::string_view node_id, ScriptBinding script);

// Same nodes (by id, with equal content) and the same link set. Workflow id,
// title and node order are ignored.
bool structurally_equal(const Workflow& a, const Workflow& b);

nlohmann::json to_json(const Workflow& wf);
// Throws MALFORMED_WORKFLOW.
Workflow workflow_from_json(const nlohmann::json& j);

std::string serialize_workflow(const Workflow& wf);
Workflow deserialize_workflow(std::string_view bytes);

}  // namespace coursegate
