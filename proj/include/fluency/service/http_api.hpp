#pragma once

#include <memory>
#include <string>

#include "fluency/core/error.hpp"
#include "fluency/service/service.hpp"

namespace httplib {
class Server;
}

namespace fluency::service {

/// NotFound/ChunkOutOfRange 404, InvalidState/InvalidAction 409, input errors
/// 400, BackendUnavailable 502, anything else 500.
int http_status_for(ErrorCode code);

/// Registers the /api/sessions routes. Error bodies are
/// {"error": "<ErrorCode>", "detail": "..."}.
void install_routes(httplib::Server& server, SessionService& service);

/// Owns an httplib::Server running on a background thread.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  /// Binds host:port (port 0 picks a free port) and starts serving. Returns
  /// the bound port. Throws Error(BadConfig) if binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fluency::service
