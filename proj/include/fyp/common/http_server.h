#pragma once

#include <memory>
#include <string>

#include "fyp/common/http.h"

namespace fyp {

// Serves a Transport over plain HTTP. Every request is handed to the
// transport verbatim (method, raw target, headers, body) and its response is
// written back; Content-Length is recomputed by the server.
class HttpServer {
 public:
  HttpServer(Transport& handler, int worker_threads = 8);
  ~HttpServer();

  // Binds "host:port" (port 0 picks a free one) and returns the bound port.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Run();
  // Bind + Run on a background thread; returns the bound port.
  int Start(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fyp
