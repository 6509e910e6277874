#pragma once

#include <string>

#include <httplib.h>

#include "kwb/service.hpp"

namespace kwb {

// Binds a Service to HTTP/1.1 via cpp-httplib. Every request is forwarded
// to Service::handle, so HTTP bodies are byte-identical to in-process calls.
class HttpServer {
 public:
  explicit HttpServer(Service& service) : service_(service) {
    // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which lets a
    // second server share a port that is already taken.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      Request r{req.method, req.path, req.body, req.get_header_value("X-Student-Id")};
      auto out = service_.handle(r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server_.Get(".*", forward);
    server_.Post(".*", forward);
    server_.Put(".*", forward);
    server_.Delete(".*", forward);
  }

  // False when the port cannot be bound (e.g. already in use).
  bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }

  // Binds an ephemeral port and returns it, or -1.
  int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }

  // Blocks until stop() is called.
  bool listen() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  bool running() const { return server_.is_running(); }

 private:
  Service& service_;
  httplib::Server server_;
};

}  // namespace kwb
