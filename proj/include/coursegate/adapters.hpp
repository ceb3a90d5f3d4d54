#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coursegate/harmonic_chain.hpp"
#include "coursegate/workflow.hpp"

namespace coursegate {

struct AdapterInput {
  std::string port;
  std::string kind;
  std::string bytes;
};

struct AdapterRequest {
  std::string node_id;
  std::vector<AdapterInput> inputs;
  std::vector<Port> out_ports;
  ParameterSet parameters;
  std::optional<ScriptBinding> script;
  std::uint64_t seed = 0;

  // First input of the given kind; throws ADAPTER_FAILURE when absent.
  const std::string& input_of_kind(std::string_view kind) const;
};

// Out-port name -> bytes.
using AdapterOutputs = std::map<std::string, std::string>;

// A tool wrapped for execution. Implementations must be reentrant and
// deterministic in the request.
class ToolAdapter {
 public:
  virtual ~ToolAdapter() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> input_kinds() const = 0;
  virtual std::vector<std::string> output_kinds() const = 0;
  virtual AdapterOutputs run(const AdapterRequest& request) const = 0;
};

// Adapter whose single output kind is computed by a callable and copied to
// every out-port of that kind.
class FunctionAdapter : public ToolAdapter {
 public:
  using Body = std::function<std::string(const AdapterRequest&)>;

  FunctionAdapter(std::string name, std::vector<std::string> input_kinds, std::string output_kind,
                  Body body);

  std::string name() const override { return name_; }
  std::vector<std::string> input_kinds() const override { return input_kinds_; }
  std::vector<std::string> output_kinds() const override { return {output_kind_}; }
  AdapterOutputs run(const AdapterRequest& request) const override;

 private:
  std::string name_;
  std::vector<std::string> input_kinds_;
  std::string output_kind_;
  Body body_;
};

// Parameter helpers; each throws BAD_PARAMETER on non-numeric text or on a
// value outside the allowed range.
long long int_param(const ParameterSet& params, const std::string& key, long long fallback,
                    long long min_value);
double real_param(const ParameterSet& params, const std::string& key, double fallback,
                  bool require_positive);

ChainParams chain_params_from(const ParameterSet& params);

// Builtin stubs standing in for the MD toolchain.
std::string lammps_stub(const ParameterSet& params, std::uint64_t seed);
std::string r_stub(std::string_view trajectory_table, const std::optional<ScriptBinding>& script);
std::string atomeye_stub(std::string_view trajectory_table, const ParameterSet& params);
std::string ffmpeg_stub(std::string_view frame_list, const ParameterSet& params);
std::string debyer_stub(std::string_view trajectory_table, const ParameterSet& params);

class AdapterRegistry {
 public:
  AdapterRegistry() = default;

  // lammps-stub, r-stub, atomeye-stub, ffmpeg-stub, debyer-stub; plus `exec`
  // (runs the `command` parameter through /bin/sh) when enable_exec is set.
  static AdapterRegistry with_builtins(bool enable_exec = false);

  void add(std::shared_ptr<const ToolAdapter> adapter);
  bool remove(std::string_view tool);
  std::shared_ptr<const ToolAdapter> find(std::string_view tool) const;
  std::set<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const ToolAdapter>, std::less<>> adapters_;
};

}  // namespace coursegate
