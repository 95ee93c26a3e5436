// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <thread>

#include "caseforge/formal.hpp"
#include "httplib.h"

namespace caseforge::formal {

ServiceConfig parse_bind_address(std::string_view address) {
  ServiceConfig config;
  std::string_view port_text = address;
  if (const std::size_t colon = address.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) config.host = std::string(address.substr(0, colon));
    port_text = address.substr(colon + 1);
  }
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("bad bind address '" + std::string(address) + "'");
  }
  config.port = port;
  return config;
}

struct BackendService::Impl {
  ServiceConfig config;
  httplib::Server server;
  std::thread thread;
  int bound_port = -1;

  void bind() {
    server.set_payload_max_length(config.max_body_bytes);
    // The library default adds SO_REUSEPORT, which lets a second server share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    server.Post("/check", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(diagnostics_to_json(check_text(req.body)), "application/json");
    });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    if (config.port == 0) {
      bound_port = server.bind_to_any_port(config.host);
    } else if (server.bind_to_port(config.host, config.port)) {
      bound_port = config.port;
    }
    if (bound_port <= 0) {
      throw IoError("cannot bind " + config.host + ":" + std::to_string(config.port));
    }
  }
};

BackendService::BackendService(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
}

BackendService::~BackendService() { stop(); }

void BackendService::start() {
  impl_->bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void BackendService::serve() {
  impl_->bind();
  impl_->server.listen_after_bind();
}

void BackendService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int BackendService::port() const { return impl_->bound_port; }

}  // namespace caseforge::formal
