#include "fyp/proxy/recorder.h"

#include <charconv>
#include <filesystem>

#include "fyp/common/error.h"
#include "fyp/wire/signing.h"

namespace fyp::proxy {

struct RecordingTransport::Session {
  std::mutex mu;
  std::uint64_t next_sequence = 1;
  std::vector<RecordedExchange> exchanges;
  std::unique_ptr<TraceWriter> writer;
};

std::string SessionKey(const HttpRequest& request) {
  auto device = FindHeader(request.headers, wire::kDeviceHeader);
  if (!device || device->empty()) return "unsigned";
  std::string key;
  for (char c : *device) {
    bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    key.push_back(safe ? c : '_');
  }
  return key;
}

RecordingTransport::RecordingTransport(Transport& upstream, RecorderOptions options)
    : upstream_(upstream), options_(std::move(options)) {
  if (!options_.clock) options_.clock = WallClockMs;
  if (!options_.trace_dir.empty()) std::filesystem::create_directories(options_.trace_dir);
}

RecordingTransport::~RecordingTransport() = default;

RecordingTransport::Session& RecordingTransport::GetSession(const std::string& key) {
  std::lock_guard lock(mu_);
  auto& slot = sessions_[key];
  if (!slot) {
    slot = std::make_unique<Session>();
    if (!options_.trace_dir.empty()) {
      slot->writer = std::make_unique<TraceWriter>(
          (std::filesystem::path(options_.trace_dir) / (key + ".fltrace")).string());
    }
  }
  return *slot;
}

void RecordingTransport::OpenSession(const std::string& session) { GetSession(session); }

HttpResponse RecordingTransport::RoundTrip(const HttpRequest& request) {
  Session& session = GetSession(SessionKey(request));
  std::lock_guard lock(session.mu);

  std::int64_t timestamp = 0;
  bool stamped = false;
  if (options_.prefer_request_timestamp) {
    if (auto ts = FindHeader(request.headers, wire::kTimestampHeader)) {
      auto [ptr, ec] = std::from_chars(ts->data(), ts->data() + ts->size(), timestamp);
      stamped = ec == std::errc() && ptr == ts->data() + ts->size();
    }
  }
  if (!stamped) timestamp = options_.clock();

  HttpResponse response = upstream_.RoundTrip(request);

  RecordedExchange exchange;
  exchange.sequence_no = session.next_sequence++;
  exchange.timestamp_ms = timestamp;
  exchange.method = request.method;
  exchange.path = request.path;
  exchange.request_headers = request.headers;
  exchange.request_body = request.body;
  exchange.response_status = response.status;
  exchange.response_body = response.body;
  if (session.writer) session.writer->Append(exchange);
  session.exchanges.push_back(std::move(exchange));
  return response;
}

std::vector<std::string> RecordingTransport::Sessions() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> keys;
  for (const auto& [k, _] : sessions_) keys.push_back(k);
  return keys;
}

std::vector<RecordedExchange> RecordingTransport::Exchanges(const std::string& key) const {
  Session* session = nullptr;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(key);
    if (it == sessions_.end()) return {};
    session = it->second.get();
  }
  std::lock_guard lock(session->mu);
  return session->exchanges;
}

std::string RecordingTransport::TracePath(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(key);
  if (it == sessions_.end() || !it->second->writer) return "";
  return it->second->writer->path();
}

}  // namespace fyp::proxy
