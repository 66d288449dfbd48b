#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fyp/common/clock.h"
#include "fyp/common/http.h"
#include "fyp/wire/compression.h"
#include "fyp/wire/messages.h"

namespace fyp::client {

// Parsed form of the platform's account-state endpoint.
struct AccountView {
  std::string account_id;
  std::string device_id;
  std::map<std::string, double> affinity;
  std::string affinity_text;
  std::uint64_t seen_count = 0;
  std::uint64_t signal_count = 0;
  std::uint64_t last_nonce = 0;
  std::uint64_t scroll_pages = 0;
  std::string digest;
};

AccountView ParseAccountView(const std::string& json);

// Maps an HTTP error status from the platform to the matching ErrorCode
// and throws. No-op for 2xx.
void ThrowForStatus(const HttpRequest& request, const HttpResponse& response);

// Registers a fresh account over `transport`.
wire::AccountCredentials Register(Transport& transport);

// Reads an account's state through the unsigned admin endpoint.
AccountView FetchAccountView(Transport& transport, const std::string& account_id);

// Signed client for one account. Holds the account's session nonce, so use
// one instance per account and do not share it across threads.
class PlatformClient {
 public:
  PlatformClient(Transport& transport, wire::AccountCredentials credentials,
                 std::shared_ptr<const wire::Dictionary> dictionary, ClockFn clock);

  const wire::AccountCredentials& credentials() const { return credentials_; }

  // Scroll-mode page; reports are attached to the request body.
  wire::FeedPage Scroll(std::uint32_t count, std::vector<wire::WatchReport> reports = {});
  // Fetch-mode page; does not touch account state.
  wire::FeedPage Fetch(std::uint32_t count, std::uint64_t cursor);
  wire::FeedPage Search(const std::vector<std::string>& keywords, std::uint32_t count);

  void ReportWatch(const wire::WatchReport& report,
                   wire::VideoOrigin origin = wire::VideoOrigin::kFyp);
  void SendFeedback(const std::string& video_id, wire::FeedbackAction action);
  void SendAppLog(std::vector<wire::AppLogEvent> events);

  AccountView State();

  std::uint64_t last_nonce() const { return nonce_; }
  // Continues after signals sent by someone else (e.g. a replay).
  void set_last_nonce(std::uint64_t nonce) { nonce_ = nonce; }

 private:
  HttpRequest NewRequest(std::string method, std::string path, std::string content_type,
                         std::string body);
  HttpResponse Send(HttpRequest request);

  Transport& transport_;
  wire::AccountCredentials credentials_;
  std::shared_ptr<const wire::Dictionary> dictionary_;
  ClockFn clock_;
  std::uint64_t nonce_ = 0;
};

}  // namespace fyp::client
