#include "fyp/common/http_server.h"

#include <thread>

#include "fyp/common/error.h"
#include "httplib.h"

namespace fyp {

struct HttpServer::Impl {
  Transport& handler;
  httplib::Server server;
  std::thread thread;
  explicit Impl(Transport& h) : handler(h) {}
};

HttpServer::HttpServer(Transport& handler, int worker_threads)
    : impl_(std::make_unique<Impl>(handler)) {
  impl_->server.set_tcp_nodelay(true);
  impl_->server.new_task_queue = [worker_threads] {
    return new httplib::ThreadPool(static_cast<size_t>(std::max(1, worker_threads)));
  };
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest request;
    request.method = req.method;
    request.path = req.target;
    for (const auto& [k, v] : req.headers) {
      if (k == "REMOTE_ADDR" || k == "REMOTE_PORT" || k == "LOCAL_ADDR" || k == "LOCAL_PORT") {
        continue;
      }
      request.headers.emplace_back(k, v);
    }
    request.body = req.body;
    HttpResponse response;
    try {
      response = impl_->handler.RoundTrip(request);
    } catch (const Error& e) {
      response.status = e.code() == ErrorCode::kInfrastructure ? 502 : 500;
      response.headers = {{"X-FL-Error", ErrorCodeName(e.code())}};
      response.body = e.what();
    } catch (const std::exception& e) {
      response.status = 500;
      response.body = e.what();
    }
    res.status = response.status;
    std::string content_type = "application/octet-stream";
    for (const auto& [k, v] : response.headers) {
      std::string lower;
      for (char c : k) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      if (lower == "content-length" || lower == "transfer-encoding" || lower == "connection" ||
          lower == "keep-alive") {
        continue;
      }
      if (lower == "content-type") {
        content_type = v;
        continue;
      }
      res.set_header(k, v);
    }
    res.set_content(response.body, content_type);
  };
  for (const char* pattern : {R"(.*)"}) {
    impl_->server.Get(pattern, route);
    impl_->server.Post(pattern, route);
    impl_->server.Put(pattern, route);
    impl_->server.Delete(pattern, route);
  }
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kInfrastructure,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::Run() { impl_->server.listen_after_bind(); }

int HttpServer::Start(const std::string& host, int port) {
  int bound = Bind(host, port);
  impl_->thread = std::thread([this] { Run(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace fyp
