#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "coursegate/error.hpp"
#include "coursegate/gateway.hpp"

namespace httplib {
class Server;
}

namespace coursegate {

struct ServeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  GatewayConfig gateway;
  std::optional<std::filesystem::path> static_dir;  // composer UI assets, served at /
};

int http_status_for(ErrorCode code) noexcept;
// {"code", "message", "details"?}
nlohmann::json error_body(const Error& e);

// The /v1 JSON API over a Gateway. The constructor loads state and binds the
// port, so failures surface before serving starts.
class HttpService {
 public:
  // Throws DATA_DIR_UNWRITABLE or PORT_IN_USE.
  explicit HttpService(ServeConfig config);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  int port() const noexcept { return port_; }
  Gateway& gateway() noexcept { return *gateway_; }

  // Serves on a background thread; returns once the listener is ready.
  void start();
  // Serves on the calling thread until stop() is called from elsewhere.
  void run();
  // Stops accepting requests, waits for the listener and flushes state.
  void stop();

 private:
  void install_routes();

  ServeConfig config_;
  std::unique_ptr<Gateway> gateway_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace coursegate
