#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fyp/common/clock.h"
#include "fyp/common/http.h"
#include "fyp/proxy/trace.h"

namespace fyp::proxy {

struct RecorderOptions {
  // Directory receiving one "<session>.fltrace" (+ ".idx") per session.
  // Empty keeps traces in memory only.
  std::string trace_dir;
  // Stamp records with the request's X-FL-Timestamp when it has one; the
  // clock below is used otherwise.
  bool prefer_request_timestamp = true;
  ClockFn clock;
};

// Session key of a request: its X-FL-Device-Id, or "unsigned" when absent.
std::string SessionKey(const HttpRequest& request);

// Forwards every request to `upstream` unchanged and records the exchange
// in the session it belongs to. Requests of one session are forwarded and
// recorded one at a time, so a session's records are in send order;
// different sessions proceed concurrently and never share a file.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& upstream, RecorderOptions options);
  ~RecordingTransport() override;

  HttpResponse RoundTrip(const HttpRequest& request) override;

  std::vector<std::string> Sessions() const;
  // Recorded exchanges of a session, in order. Empty for unknown sessions.
  std::vector<RecordedExchange> Exchanges(const std::string& session) const;
  // Path of the session's trace file, or "" when not persisting.
  std::string TracePath(const std::string& session) const;
  // Creates the session's (empty) trace file if it does not exist yet.
  void OpenSession(const std::string& session);

 private:
  struct Session;
  Session& GetSession(const std::string& key);

  Transport& upstream_;
  RecorderOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
};

}  // namespace fyp::proxy
