#include "fyp/client/client.h"

#include "fyp/common/error.h"
#include "fyp/common/text.h"
#include "fyp/wire/applog.h"
#include "fyp/wire/endpoints.h"
#include "fyp/wire/signing.h"
#include "nlohmann/json.hpp"

namespace fyp::client {

AccountView ParseAccountView(const std::string& json) {
  try {
    auto j = nlohmann::json::parse(json);
    AccountView v;
    v.account_id = j.at("account_id").get<std::string>();
    v.device_id = j.at("device_id").get<std::string>();
    for (const auto& [topic, score] : j.at("affinity").items()) {
      v.affinity[topic] = score.get<double>();
    }
    v.affinity_text = j.at("affinity_text").get<std::string>();
    v.seen_count = j.at("seen_count").get<std::uint64_t>();
    v.signal_count = j.at("signal_count").get<std::uint64_t>();
    v.last_nonce = j.at("last_nonce").get<std::uint64_t>();
    v.scroll_pages = j.at("scroll_pages").get<std::uint64_t>();
    v.digest = j.at("digest").get<std::string>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProtocol, std::string("bad account state document: ") + e.what());
  }
}

void ThrowForStatus(const HttpRequest& request, const HttpResponse& response) {
  if (response.status >= 200 && response.status < 300) return;
  ErrorCode code = ErrorCode::kInfrastructure;
  switch (response.status) {
    case 400: code = ErrorCode::kProtocol; break;
    case 401: code = ErrorCode::kAuth; break;
    case 404: code = ErrorCode::kNotFound; break;
    case 409: code = ErrorCode::kIntegrity; break;
    default: break;
  }
  throw Error(code, request.method + " " + request.path + " -> " +
                        std::to_string(response.status) + " " + response.body);
}

wire::AccountCredentials Register(Transport& transport) {
  HttpRequest request{"POST", std::string(wire::kRegisterPath), {}, {}};
  HttpResponse response = transport.RoundTrip(request);
  ThrowForStatus(request, response);
  return wire::DecodeCredentials(response.body);
}

AccountView FetchAccountView(Transport& transport, const std::string& account_id) {
  HttpRequest request{"GET",
                      std::string(wire::kStatePath) + "?account_id=" + PercentEncode(account_id),
                      {},
                      {}};
  HttpResponse response = transport.RoundTrip(request);
  ThrowForStatus(request, response);
  return ParseAccountView(response.body);
}

PlatformClient::PlatformClient(Transport& transport, wire::AccountCredentials credentials,
                               std::shared_ptr<const wire::Dictionary> dictionary,
                               ClockFn clock)
    : transport_(transport),
      credentials_(std::move(credentials)),
      dictionary_(std::move(dictionary)),
      clock_(clock ? std::move(clock) : ClockFn(WallClockMs)) {
  if (!dictionary_) {
    dictionary_ = std::make_shared<wire::Dictionary>(wire::DefaultEventDictionary());
  }
}

HttpRequest PlatformClient::NewRequest(std::string method, std::string path,
                                       std::string content_type, std::string body) {
  HttpRequest request;
  request.method = std::move(method);
  request.path = std::move(path);
  if (!content_type.empty()) request.headers.emplace_back("Content-Type", content_type);
  request.headers.emplace_back(wire::kAccountHeader, credentials_.account_id);
  request.headers.emplace_back(wire::kDeviceHeader, credentials_.device_id);
  request.headers.emplace_back(wire::kTimestampHeader, std::to_string(clock_()));
  request.headers.emplace_back("User-Agent", "fyp-puppet/1.0");
  request.body = std::move(body);
  wire::SignInPlace(request, {credentials_.key_id, credentials_.key});
  return request;
}

HttpResponse PlatformClient::Send(HttpRequest request) {
  HttpResponse response = transport_.RoundTrip(request);
  ThrowForStatus(request, response);
  return response;
}

wire::FeedPage PlatformClient::Scroll(std::uint32_t count, std::vector<wire::WatchReport> reports) {
  wire::FeedRequestBody body;
  body.account_id = credentials_.account_id;
  body.device_id = credentials_.device_id;
  body.session_nonce = ++nonce_;
  body.watch_reports = std::move(reports);
  body.client_timestamp_ms = clock_();
  body.count = count;
  auto response = Send(NewRequest("POST", std::string(wire::kFeedPath),
                                  std::string(wire::kProtobufContentType), wire::Encode(body)));
  return wire::DecodeFeedPage(response.body);
}

wire::FeedPage PlatformClient::Fetch(std::uint32_t count, std::uint64_t cursor) {
  std::string path = std::string(wire::kFetchFeedPath) + "?count=" + std::to_string(count) +
                     "&cursor=" + std::to_string(cursor);
  return wire::DecodeFeedPage(Send(NewRequest("GET", path, "", "")).body);
}

wire::FeedPage PlatformClient::Search(const std::vector<std::string>& keywords,
                                      std::uint32_t count) {
  std::vector<std::string> encoded;
  for (const auto& k : keywords) encoded.push_back(PercentEncode(k));
  std::string path = std::string(wire::kSearchPath) + "?keyword=" + Join(encoded, ",") +
                     "&count=" + std::to_string(count);
  return wire::DecodeFeedPage(Send(NewRequest("GET", path, "", "")).body);
}

void PlatformClient::ReportWatch(const wire::WatchReport& report, wire::VideoOrigin origin) {
  wire::StatsBody body;
  body.account_id = credentials_.account_id;
  body.device_id = credentials_.device_id;
  body.session_nonce = ++nonce_;
  body.report = report;
  body.client_timestamp_ms = clock_();
  body.origin = origin;
  Send(NewRequest("POST", std::string(wire::kStatsPath), std::string(wire::kProtobufContentType),
                  wire::Encode(body)));
}

void PlatformClient::SendFeedback(const std::string& video_id, wire::FeedbackAction action) {
  wire::FeedbackBody body;
  body.account_id = credentials_.account_id;
  body.device_id = credentials_.device_id;
  body.session_nonce = ++nonce_;
  body.video_id = video_id;
  body.action = action;
  body.client_timestamp_ms = clock_();
  Send(NewRequest("POST", std::string(wire::kFeedbackPath),
                  std::string(wire::kProtobufContentType), wire::Encode(body)));
}

void PlatformClient::SendAppLog(std::vector<wire::AppLogEvent> events) {
  wire::AppLogBatch batch;
  batch.account_id = credentials_.account_id;
  batch.device_id = credentials_.device_id;
  batch.session_nonce = ++nonce_;
  batch.events = std::move(events);
  batch.client_timestamp_ms = clock_();
  Send(NewRequest("POST", std::string(wire::kAppLogPath), std::string(wire::kAppLogContentType),
                  wire::EncodeAppLogPayload(batch, *dictionary_)));
}

AccountView PlatformClient::State() {
  return FetchAccountView(transport_, credentials_.account_id);
}

}  // namespace fyp::client
