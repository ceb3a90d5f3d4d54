#include "coursegate/adapters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coursegate/error.hpp"

namespace coursegate {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void bad_parameter(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kBadParameter, "parameter '" + key + "' " + why, {{"parameter", key}});
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  while (true) {
    auto pos = text.find(sep);
    out.emplace_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

class ExecAdapter : public ToolAdapter {
 public:
  std::string name() const override { return "exec"; }
  std::vector<std::string> input_kinds() const override { return {}; }
  std::vector<std::string> output_kinds() const override { return {}; }

  AdapterOutputs run(const AdapterRequest& request) const override {
    auto it = request.parameters.find("command");
    if (it == request.parameters.end() || trim(it->second).empty()) {
      bad_parameter("command", "is required by the exec adapter");
    }
    std::string pattern = (fs::temp_directory_path() / "coursegate-exec-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) {
      throw Error(ErrorCode::kAdapterFailure, "cannot create a scratch directory for exec");
    }
    const fs::path dir = pattern;
    auto write = [&](const std::string& name, const std::string& bytes) {
      std::ofstream(dir / name, std::ios::binary) << bytes;
    };
    for (const auto& in : request.inputs) write(in.port, in.bytes);
    if (request.script) write("script", request.script->content);
    write("command.sh", it->second);

    std::string shell = "cd '" + dir.string() + "' && COURSEGATE_SEED=" +
                        std::to_string(request.seed) + " /bin/sh command.sh > stdout.log 2>&1";
    int status = std::system(shell.c_str());
    AdapterOutputs outputs;
    std::string failure;
    if (status != 0) {
      failure = "command exited with status " + std::to_string(status);
    } else {
      for (const auto& port : request.out_ports) {
        std::ifstream file(dir / port.name, std::ios::binary);
        if (!file) {
          failure = "command did not write out-port file '" + port.name + "'";
          break;
        }
        std::ostringstream buf;
        buf << file.rdbuf();
        outputs[port.name] = buf.str();
      }
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    if (!failure.empty()) throw Error(ErrorCode::kAdapterFailure, failure);
    return outputs;
  }
};

}  // namespace

const std::string& AdapterRequest::input_of_kind(std::string_view kind) const {
  for (const auto& in : inputs) {
    if (in.kind == kind) return in.bytes;
  }
  throw Error(ErrorCode::kAdapterFailure,
              "node '" + node_id + "' received no input of kind '" + std::string(kind) + "'");
}

FunctionAdapter::FunctionAdapter(std::string name, std::vector<std::string> input_kinds,
                                 std::string output_kind, Body body)
    : name_(std::move(name)),
      input_kinds_(std::move(input_kinds)),
      output_kind_(std::move(output_kind)),
      body_(std::move(body)) {}

AdapterOutputs FunctionAdapter::run(const AdapterRequest& request) const {
  auto payload = body_(request);
  AdapterOutputs outputs;
  for (const auto& port : request.out_ports) {
    if (port.kind == output_kind_) outputs[port.name] = payload;
  }
  return outputs;
}

long long int_param(const ParameterSet& params, const std::string& key, long long fallback,
                    long long min_value) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  auto text = trim(it->second);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_parameter(key, "must be an integer");
  if (value < min_value) bad_parameter(key, "must be at least " + std::to_string(min_value));
  return value;
}

double real_param(const ParameterSet& params, const std::string& key, double fallback,
                  bool require_positive) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  auto text = trim(it->second);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    bad_parameter(key, "must be a finite number");
  }
  if (require_positive && value <= 0.0) bad_parameter(key, "must be positive");
  return value;
}

ChainParams chain_params_from(const ParameterSet& params) {
  ChainParams p;
  p.n_particles = static_cast<int>(int_param(params, "n_particles", p.n_particles, 2));
  p.steps = static_cast<int>(int_param(params, "steps", p.steps, 1));
  p.dt = real_param(params, "dt", p.dt, true);
  p.strain_rate = real_param(params, "strain_rate", p.strain_rate, false);
  p.velocity_scale = real_param(params, "velocity_scale", p.velocity_scale, false);
  if (p.velocity_scale < 0.0) bad_parameter("velocity_scale", "must be non-negative");
  return p;
}

std::string lammps_stub(const ParameterSet& params, std::uint64_t seed) {
  return format_trajectory_table(run_harmonic_chain(chain_params_from(params), seed));
}

std::string r_stub(std::string_view trajectory_table, const std::optional<ScriptBinding>& script) {
  std::vector<std::string> columns = {"step", "mean_force"};
  if (script) {
    std::istringstream lines(script->content);
    std::string line;
    while (std::getline(lines, line)) {
      auto t = trim(line);
      if (t.rfind("select", 0) == 0) {
        columns = split(trim(t.substr(6)), ',');
        break;
      }
    }
  }
  static const std::vector<std::string> kColumns = {"step", "mean_force", "total_energy", "digest"};
  std::vector<std::size_t> picks;
  for (const auto& c : columns) {
    auto it = std::find(kColumns.begin(), kColumns.end(), c);
    if (it == kColumns.end()) bad_parameter("script", "selects unknown column '" + c + "'");
    picks.push_back(static_cast<std::size_t>(it - kColumns.begin()));
  }
  auto table = parse_trajectory_table(trajectory_table);
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    const std::string* cells[] = {&row.step, &row.mean_force, &row.total_energy, &row.digest};
    for (std::size_t i = 0; i < picks.size(); ++i) {
      if (i) out += ',';
      out += *cells[picks[i]];
    }
    out += '\n';
  }
  return out;
}

std::string atomeye_stub(std::string_view trajectory_table, const ParameterSet& params) {
  auto every = int_param(params, "frame_every", 100, 1);
  auto table = parse_trajectory_table(trajectory_table);
  std::string out = "frame,step,digest\n";
  long long frame = 0;
  for (const auto& row : table.rows) {
    long long step = 0;
    std::from_chars(row.step.data(), row.step.data() + row.step.size(), step);
    if (step % every != 0) continue;
    out += std::to_string(frame++) + "," + row.step + "," + row.digest + "\n";
  }
  return out;
}

std::string ffmpeg_stub(std::string_view frame_list, const ParameterSet& params) {
  auto fps = int_param(params, "fps", 25, 1);
  std::istringstream in{std::string(frame_list)};
  std::string line;
  if (!std::getline(in, line) || line != "frame,step,digest") {
    throw Error(ErrorCode::kAdapterFailure, "malformed frame-list: missing header");
  }
  std::vector<std::string> frames;
  while (std::getline(in, line)) {
    if (!line.empty()) frames.push_back(line);
  }
  std::string out = "VIDEO fps=" + std::to_string(fps) + " frames=" + std::to_string(frames.size()) + "\n";
  for (const auto& f : frames) out += f + "\n";
  return out;
}

std::string debyer_stub(std::string_view trajectory_table, const ParameterSet& params) {
  auto bins = static_cast<std::size_t>(int_param(params, "bins", 64, 1));
  auto table = parse_trajectory_table(trajectory_table);
  if (table.snapshot.empty()) {
    throw Error(ErrorCode::kAdapterFailure, "trajectory-table carries no position snapshot");
  }
  auto [lo_it, hi_it] = std::minmax_element(table.snapshot.begin(), table.snapshot.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : table.snapshot) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
    ++counts[std::min(b, bins - 1)];
  }
  std::string out = "bin,lower,upper,count\n";
  for (std::size_t b = 0; b < bins; ++b) {
    out += std::to_string(b) + "," + format_sci9(lo + width * static_cast<double>(b)) + "," +
           format_sci9(lo + width * static_cast<double>(b + 1)) + "," + std::to_string(counts[b]) + "\n";
  }
  return out;
}

AdapterRegistry AdapterRegistry::with_builtins(bool enable_exec) {
  AdapterRegistry reg;
  reg.add(std::make_shared<FunctionAdapter>(
      "lammps-stub", std::vector<std::string>{}, "trajectory-table",
      [](const AdapterRequest& r) { return lammps_stub(r.parameters, r.seed); }));
  reg.add(std::make_shared<FunctionAdapter>(
      "r-stub", std::vector<std::string>{"trajectory-table"}, "plot-data",
      [](const AdapterRequest& r) { return r_stub(r.input_of_kind("trajectory-table"), r.script); }));
  reg.add(std::make_shared<FunctionAdapter>(
      "atomeye-stub", std::vector<std::string>{"trajectory-table"}, "frame-list",
      [](const AdapterRequest& r) {
        return atomeye_stub(r.input_of_kind("trajectory-table"), r.parameters);
      }));
  reg.add(std::make_shared<FunctionAdapter>(
      "ffmpeg-stub", std::vector<std::string>{"frame-list"}, "video",
      [](const AdapterRequest& r) { return ffmpeg_stub(r.input_of_kind("frame-list"), r.parameters); }));
  reg.add(std::make_shared<FunctionAdapter>(
      "debyer-stub", std::vector<std::string>{"trajectory-table"}, "histogram",
      [](const AdapterRequest& r) {
        return debyer_stub(r.input_of_kind("trajectory-table"), r.parameters);
      }));
  if (enable_exec) reg.add(std::make_shared<ExecAdapter>());
  return reg;
}

void AdapterRegistry::add(std::shared_ptr<const ToolAdapter> adapter) {
  auto name = adapter->name();
  adapters_[name] = std::move(adapter);
}

bool AdapterRegistry::remove(std::string_view tool) {
  auto it = adapters_.find(tool);
  if (it == adapters_.end()) return false;
  adapters_.erase(it);
  return true;
}

std::shared_ptr<const ToolAdapter> AdapterRegistry::find(std::string_view tool) const {
  auto it = adapters_.find(tool);
  return it == adapters_.end() ? nullptr : it->second;
}

std::set<std::string> AdapterRegistry::names() const {
  std::set<std::string> out;
  for (const auto& [name, _] : adapters_) out.insert(name);
  return out;
}

}  // namespace coursegate
