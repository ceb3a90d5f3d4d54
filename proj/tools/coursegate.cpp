// coursegate: command-line front end over a local data directory, plus
// `serve` for the HTTP API.

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coursegate/canonical_json.hpp"
#include "coursegate/error.hpp"
#include "coursegate/gateway.hpp"
#include "coursegate/http_service.hpp"
#include "coursegate/scale.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coursegate;

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + path, {{"path", path}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    if (!bytes.empty() && bytes.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw Error(ErrorCode::kDataDirUnwritable, "cannot write " + path, {{"path", path}});
}

void print(const json& value) { std::cout << canonical_dump(value) << '\n'; }

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int serve(ServeConfig config) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpService service(std::move(config));
  service.start();
  std::cout << "listening on port " << service.port() << std::endl;
  int received = 0;
  sigwait(&signals, &received);
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coursegate: module registry, curriculum planner and workflow executor"};
  app.require_subcommand(1);

  std::string data_dir = env_or("COURSEGATE_DATA_DIR", "coursegate-data");
  std::size_t worker_limit = 4;
  bool enable_exec = false;
  app.add_option("--data-dir", data_dir, "State directory (env COURSEGATE_DATA_DIR)");
  app.add_option("--worker-limit", worker_limit, "Concurrent adapter bodies")->check(CLI::PositiveNumber);
  app.add_flag("--enable-exec", enable_exec, "Register the exec adapter (runs shell commands)");

  std::string file, id, scale, category, language, target, keep, out, duration;
  std::string pool, policy = "round_robin", run_id, node, port_name;
  std::string host = "127.0.0.1", static_dir;
  std::vector<std::string> keywords, inputs;
  int max_complexity = 0, stars = 0;
  int port = std::atoi(env_or("COURSEGATE_PORT", "8080").c_str());
  std::int64_t max_minutes = 0;
  std::uint64_t seed = 0;
  std::function<int()> action;
  auto gateway = [&] {
    return std::make_unique<Gateway>(GatewayConfig{data_dir, worker_limit, enable_exec});
  };

  // module
  auto* module = app.add_subcommand("module", "Course module records")->require_subcommand(1);
  {
    auto* add = module->add_subcommand("add", "Register a module from a JSON file");
    add->add_option("file", file)->required();
    add->callback([&] {
      action = [&] {
        print({{"id", gateway()->add_module(parse_body(read_input(file)))}});
        return 0;
      };
    });

    auto* validate = module->add_subcommand("validate", "Validate a module file against the registry");
    validate->add_option("file", file)->required();
    validate->callback([&] {
      action = [&] {
        auto gw = gateway();
        auto meta = module_from_json(parse_body(read_input(file)));
        auto ids = gw->registry().ids();
        ids.insert(meta.id);
        auto report = validate_meta(meta, ids);
        print(to_json(report));
        return report.has_errors() ? 1 : 0;
      };
    });

    auto* search = module->add_subcommand("search", "Search registered modules");
    search->add_option("--keyword", keywords, "Keyword; repeat to require several");
    search->add_option("--scale", scale)->transform(CLI::IsMember({"nano", "micro", "mini", "macro"}, CLI::ignore_case));
    search->add_option("--category", category, "Category path prefix, e.g. Physics");
    search->add_option("--language", language);
    search->add_option("--max-complexity", max_complexity)->check(CLI::Range(1, 5));
    search->callback([&] {
      action = [&] {
        SearchQuery q;
        q.keywords = keywords;
        if (!scale.empty()) q.scale = parse_scale(scale);
        if (!category.empty()) q.category_prefix = category;
        if (!language.empty()) q.language = language;
        if (max_complexity > 0) q.max_complexity = max_complexity;
        auto out = json::array();
        for (const auto& m : gateway()->registry().search(q)) out.push_back(to_json(m));
        print(out);
        return 0;
      };
    });

    module->add_subcommand("list", "List registered modules")->callback([&] {
      action = [&] {
        auto out = json::array();
        for (const auto& m : gateway()->registry().modules()) out.push_back(to_json(m));
        print(out);
        return 0;
      };
    });

    auto* show = module->add_subcommand("show", "Print one module");
    show->add_option("id", id)->required();
    show->callback([&] {
      action = [&] {
        print(to_json(gateway()->module(id)));
        return 0;
      };
    });
    auto* rate = module->add_subcommand("rate", "Add a 1-5 star vote");
    rate->add_option("id", id)->required();
    rate->add_option("stars", stars)->required();
    rate->callback([&] {
      action = [&] {
        print(to_json(gateway()->rate(id, stars)));
        return 0;
      };
    });

    auto* classify = module->add_subcommand("classify", "Scale level for a duration such as \"2 weeks\"");
    classify->add_option("duration", duration)->required();
    classify->callback([&] {
      action = [&] {
        auto result = classify_scale_checked(parse_duration(duration));
        print({{"scale", to_string(result.level)}, {"oversize", result.oversize}});
        return 0;
      };
    });
  }

  // repo
  auto* repo = app.add_subcommand("repo", "Repository archives")->require_subcommand(1);
  {
    auto* exp = repo->add_subcommand("export", "Write the canonical archive");
    exp->add_option("path", file, "Output path, - for stdout")->required();
    exp->callback([&] {
      action = [&] {
        write_output(file, gateway()->export_archive());
        return 0;
      };
    });
    auto* imp = repo->add_subcommand("import", "Merge an archive into the registry");
    imp->add_option("path", file)->required();
    imp->callback([&] {
      action = [&] {
        print(to_json(gateway()->import_archive(read_input(file))));
        return 0;
      };
    });
  }

  // track
  auto* track = app.add_subcommand("track", "Course tracks")->require_subcommand(1);
  {
    auto* plan = track->add_subcommand("plan", "Cheapest valid track ending at a module");
    plan->add_option("--target", target)->required();
    plan->add_option("--max-minutes", max_minutes)->check(CLI::PositiveNumber);
    plan->add_option("--max-complexity", max_complexity)->check(CLI::Range(1, 5));
    plan->callback([&] {
      action = [&] {
        json constraints = json::object();
        if (max_minutes > 0) constraints["max_total_minutes"] = max_minutes;
        if (max_complexity > 0) constraints["max_complexity"] = max_complexity;
        print(to_json(gateway()->plan({{"target", target}, {"constraints", constraints}})));
        return 0;
      };
    });
    auto* check = track->add_subcommand("check", "Check a track file");
    check->add_option("file", file)->required();
    check->callback([&] {
      action = [&] {
        auto report = gateway()->check(parse_body(read_input(file)));
        print(to_json(report));
        return report.empty() ? 0 : 1;
      };
    });
    auto* agg = track->add_subcommand("aggregate", "Totals for a track file");
    agg->add_option("file", file)->required();
    agg->callback([&] {
      action = [&] {
        print(to_json(gateway()->aggregate(parse_body(read_input(file)))));
        return 0;
      };
    });
    auto* dot = track->add_subcommand("dot", "Prerequisite graph in DOT format");
    dot->add_option("--out", out);
    dot->callback([&] {
      action = [&] {
        write_output(out, to_dot(gateway()->graph()));
        return 0;
      };
    });
  }

  // wf
  auto* wf = app.add_subcommand("wf", "Workflows")->require_subcommand(1);
  {
    auto* validate = wf->add_subcommand("validate", "Validate a workflow file");
    validate->add_option("file", file)->required();
    validate->callback([&] {
      action = [&] {
        auto workflow = deserialize_workflow(read_input(file));
        auto tools = AdapterRegistry::with_builtins(true).names();
        auto report = validate_workflow(workflow, &tools);
        print(to_json(report));
        return report.has_errors() ? 1 : 0;
      };
    });
    auto* layers = wf->add_subcommand("layers", "Topological layers");
    layers->add_option("file", file)->required();
    layers->callback([&] {
      action = [&] {
        print(topo_layers(deserialize_workflow(read_input(file))));
        return 0;
      };
    });
    auto* subset = wf->add_subcommand("subset", "Induced sub-workflow");
    subset->add_option("file", file)->required();
    subset->add_option("--keep", keep, "Comma-separated node ids")->required();
    subset->add_option("--out", out);
    subset->callback([&] {
      action = [&] {
        auto ids = split_commas(keep);
        auto result = derive_subset(deserialize_workflow(read_input(file)), {ids.begin(), ids.end()});
        write_output(out, serialize_workflow(result));
        return 0;
      };
    });
    auto* add = wf->add_subcommand("add", "Register a workflow with the repository");
    add->add_option("file", file)->required();
    add->callback([&] {
      action = [&] {
        print({{"id", gateway()->add_workflow(parse_body(read_input(file)))}});
        return 0;
      };
    });
  }

  // run
  auto* run = app.add_subcommand("run", "Workflow runs")->require_subcommand(1);
  {
    auto* submit = run->add_subcommand("submit", "Run a workflow file or registered id to completion");
    submit->add_option("workflow", file, "Workflow file or registered workflow id")->required();
    submit->add_option("--pool", pool, "pool.json; default is one pc slot");
    submit->add_option("--policy", policy)->check(CLI::IsMember({"round_robin", "fastest_fit"}));
    submit->add_option("--seed", seed);
    submit->add_option("--input", inputs, "NODE:PORT=FILE for unlinked in-ports");
    submit->callback([&] {
      action = [&] {
        auto gw = gateway();
        json body = {{"policy", policy}, {"seed", seed}};
        if (fs::exists(file)) {
          body["workflow"] = parse_body(read_input(file));
        } else {
          body["workflow"] = file;
        }
        if (!pool.empty()) body["pool"] = parse_body(read_input(pool));
        for (const auto& spec : inputs) {
          auto colon = spec.find(':');
          auto eq = spec.find('=');
          if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
            throw Error(ErrorCode::kBadRequest, "--input expects NODE:PORT=FILE, got '" + spec + "'");
          }
          body["inputs"][spec.substr(0, colon)][spec.substr(colon + 1, eq - colon - 1)] =
              read_input(spec.substr(eq + 1));
        }
        auto id = gw->submit(gw->run_request(body));
        auto record = gw->executor().wait(id);
        print(to_json(record));
        return record.status == RunStatus::kSucceeded ? 0 : 1;
      };
    });
    auto* status = run->add_subcommand("status", "Print a run record");
    status->add_option("id", run_id)->required();
    status->callback([&] {
      action = [&] {
        print(to_json(gateway()->run(run_id)));
        return 0;
      };
    });
    auto* cancel = run->add_subcommand("cancel", "Cancel a run that has not finalized");
    cancel->add_option("id", run_id)->required();
    cancel->callback([&] {
      action = [&] {
        print({{"run_id", run_id}, {"cancelled", gateway()->executor().cancel(run_id)}});
        return 0;
      };
    });
    auto* artifacts = run->add_subcommand("artifacts", "Fetch an artifact's bytes");
    artifacts->add_option("id", run_id)->required();
    artifacts->add_option("--node", node)->required();
    artifacts->add_option("--port", port_name)->required();
    artifacts->add_option("--out", out, "Output path, stdout when omitted");
    artifacts->callback([&] {
      action = [&] {
        write_output(out, gateway()->artifact(run_id, node, port_name));
        return 0;
      };
    });
  }

  // serve
  {
    auto* srv = app.add_subcommand("serve", "Serve the /v1 HTTP API");
    srv->add_option("--port", port, "0 picks a free port (env COURSEGATE_PORT)");
    srv->add_option("--host", host);
    srv->add_option("--static-dir", static_dir, "Composer UI assets served at /");
    srv->callback([&] {
      action = [&] {
        ServeConfig config;
        config.host = host;
        config.port = port;
        config.gateway = GatewayConfig{data_dir, worker_limit, enable_exec};
        if (!static_dir.empty()) config.static_dir = static_dir;
        return serve(std::move(config));
      };
    });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : 0;
  } catch (const Error& e) {
    std::cerr << canonical_dump(error_body(e)) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << canonical_dump(json{{"code", "BAD_REQUEST"}, {"message", e.what()}}) << '\n';
    return 2;
  }
}
