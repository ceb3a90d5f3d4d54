#include "coursegate/http_service.hpp"

#include <sys/socket.h>

#include <charconv>

#include <httplib.h>

#include "coursegate/canonical_json.hpp"

namespace coursegate {
namespace {

using nlohmann::json;
using httplib::Request;
using httplib::Response;

void reply(Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json");
}

int int_query(const Request& req, const std::string& key) {
  const auto text = req.get_param_value(key);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kBadRequest, "query parameter '" + key + "' must be an integer");
  }
  return value;
}

SearchQuery search_query(const Request& req) {
  SearchQuery q;
  for (std::size_t i = 0; i < req.get_param_value_count("keyword"); ++i) {
    q.keywords.push_back(req.get_param_value("keyword", i));
  }
  if (req.has_param("category")) q.category_prefix = req.get_param_value("category");
  if (req.has_param("scale")) {
    q.scale = parse_scale(req.get_param_value("scale"));
    if (!q.scale) throw Error(ErrorCode::kBadRequest, "unknown scale '" + req.get_param_value("scale") + "'");
  }
  if (req.has_param("language")) q.language = req.get_param_value("language");
  if (req.has_param("max_complexity")) q.max_complexity = int_query(req, "max_complexity");
  return q;
}

json module_list(const std::vector<ModuleMeta>& modules) {
  auto out = json::array();
  for (const auto& m : modules) out.push_back(to_json(m));
  return out;
}

}  // namespace

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnknownModule:
    case ErrorCode::kUnknownNode:
    case ErrorCode::kUnknownRun:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kDuplicateId:
      return 409;
    case ErrorCode::kMalformedArchive:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kMalformedWorkflow:
    case ErrorCode::kBadRequest:
      return 400;
    case ErrorCode::kPortInUse:
    case ErrorCode::kDataDirUnwritable:
    case ErrorCode::kAdapterFailure:
      return 500;
    default:
      return 422;
  }
}

json error_body(const Error& e) {
  json body = {{"code", e.code_name()}, {"message", e.what()}};
  if (!e.details().is_null()) body["details"] = e.details();
  return body;
}

HttpService::HttpService(ServeConfig config) : config_(std::move(config)) {
  gateway_ = std::make_unique<Gateway>(config_.gateway);
  server_ = std::make_unique<httplib::Server>();
  // The library default sets SO_REUSEPORT, which would let a second server
  // share the port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  server_->set_payload_max_length(std::size_t{64} << 20);
  install_routes();
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.host);
  } else {
    port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorCode::kPortInUse, "cannot listen on " + config_.host + ":" + std::to_string(config_.port),
                {{"port", config_.port}});
  }
}

HttpService::~HttpService() { stop(); }

void HttpService::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpService::run() { server_->listen_after_bind(); }

void HttpService::stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  gateway_->flush();
}

void HttpService::install_routes() {
  auto& srv = *server_;
  auto& gw = *gateway_;
  using Handler = std::function<void(const Request&, Response&)>;
  auto guarded = [](Handler fn) {
    return [fn = std::move(fn)](const Request& req, Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        reply(res, http_status_for(e.code()), error_body(e));
      } catch (const std::exception& e) {
        reply(res, 500, {{"code", "INTERNAL"}, {"message", e.what()}});
      }
    };
  };
  auto body_of = [](const Request& req) { return parse_body(req.body); };

  srv.Get("/v1/modules", guarded([&gw](const Request&, Response& res) {
    reply(res, 200, module_list(gw.registry().modules()));
  }));
  srv.Post("/v1/modules", guarded([&gw, body_of](const Request& req, Response& res) {
    reply(res, 201, {{"id", gw.add_module(body_of(req))}});
  }));
  srv.Get("/v1/modules/search", guarded([&gw](const Request& req, Response& res) {
    reply(res, 200, module_list(gw.registry().search(search_query(req))));
  }));
  srv.Get(R"(/v1/modules/([^/]+))", guarded([&gw](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.module(req.matches[1])));
  }));
  srv.Post(R"(/v1/modules/([^/]+)/ratings)", guarded([&gw, body_of](const Request& req, Response& res) {
    auto body = body_of(req);
    if (!body.is_object() || !body.contains("stars") || !body["stars"].is_number_integer()) {
      throw Error(ErrorCode::kBadRequest, "body must be {\"stars\": <integer>}");
    }
    reply(res, 200, to_json(gw.rate(req.matches[1], body["stars"].get<int>())));
  }));

  srv.Post("/v1/repo/import", guarded([&gw](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.import_archive(req.body)));
  }));
  srv.Get("/v1/repo/export", guarded([&gw](const Request&, Response& res) {
    res.set_content(gw.export_archive(), "application/json");
  }));

  srv.Post("/v1/tracks/check", guarded([&gw, body_of](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.check(body_of(req))));
  }));
  srv.Post("/v1/tracks/plan", guarded([&gw, body_of](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.plan(body_of(req))));
  }));
  srv.Post("/v1/tracks/aggregate", guarded([&gw, body_of](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.aggregate(body_of(req))));
  }));

  srv.Get("/v1/workflows", guarded([&gw](const Request&, Response& res) {
    auto out = json::array();
    for (const auto& wf : gw.registry().workflows()) out.push_back(to_json(wf));
    reply(res, 200, out);
  }));
  srv.Post("/v1/workflows", guarded([&gw, body_of](const Request& req, Response& res) {
    reply(res, 201, {{"id", gw.add_workflow(body_of(req))}});
  }));
  srv.Get(R"(/v1/workflows/([^/]+))", guarded([&gw](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.workflow(req.matches[1])));
  }));
  srv.Post(R"(/v1/workflows/([^/]+)/validate)", guarded([&gw](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.validate(gw.workflow(req.matches[1]))));
  }));

  srv.Post("/v1/runs", guarded([&gw, body_of](const Request& req, Response& res) {
    auto id = gw.submit(gw.run_request(body_of(req)));
    reply(res, 202, {{"run_id", id}});
  }));
  srv.Get(R"(/v1/runs/([^/]+))", guarded([&gw](const Request& req, Response& res) {
    reply(res, 200, to_json(gw.run(req.matches[1])));
  }));
  srv.Post(R"(/v1/runs/([^/]+)/cancel)", guarded([&gw](const Request& req, Response& res) {
    const std::string id = req.matches[1];
    bool acknowledged = gw.executor().cancel(id);
    reply(res, 200, {{"run_id", id}, {"cancelled", acknowledged}});
  }));
  srv.Get(R"(/v1/runs/([^/]+)/artifacts/([^/]+)/([^/]+))", guarded([&gw](const Request& req, Response& res) {
    const std::string run = req.matches[1];
    const std::string node = req.matches[2];
    const std::string port = req.matches[3];
    auto bytes = gw.artifact(run, node, port);
    res.set_header("X-Artifact-Id", gw.run(run).find_artifact(node, port)->id);
    res.set_content(std::move(bytes), "text/plain");
  }));

  if (config_.static_dir) srv.set_mount_point("/", config_.static_dir->string());

  srv.set_error_handler([](const Request& req, Response& res) {
    if (res.body.empty() && res.status == 404) {
      reply(res, 404, error_body(Error(ErrorCode::kNotFound, "no route for " + req.method + " " + req.path)));
    }
  });
}

}  // namespace coursegate
