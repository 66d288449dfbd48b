#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fyp/common/error.h"
#include "fyp/common/http.h"
#include "fyp/platform/corpus.h"
#include "fyp/platform/types.h"
#include "fyp/wire/compression.h"
#include "fyp/wire/messages.h"

namespace fyp::platform {

struct PlatformOptions {
  std::uint64_t seed = 1;
  Calibration calibration;
  // Shared app-log dictionary; DefaultEventDictionary() when null.
  std::shared_ptr<const wire::Dictionary> dictionary;
  std::uint32_t max_page_size = 500;
};

// The simulated short-video service. All methods are thread-safe: account
// state mutations are serialized per account, different accounts proceed
// independently, and the corpus is shared read-only.
//
// Every random draw is derived from (platform seed, account id, page
// counter or fetch cursor), so results do not depend on how concurrent
// sessions interleave.
class PlatformService : public Transport {
 public:
  PlatformService(std::shared_ptr<const Corpus> corpus, PlatformOptions options);
  ~PlatformService() override;

  // HTTP-level entry point used by the server, the in-process transport and
  // the recording proxy. Never throws; failures become 4xx/5xx responses.
  HttpResponse Handle(const HttpRequest& request);
  HttpResponse RoundTrip(const HttpRequest& request) override { return Handle(request); }

  // Direct API. Throws fyp::Error: kAuth for unknown accounts (kNotFound
  // from Snapshot), kProtocol for unknown videos or malformed reports.
  wire::AccountCredentials CreateAccount();
  wire::FeedPage ServeFeed(const std::string& account_id, std::uint32_t count, FeedMode mode,
                           std::uint64_t cursor = 0);
  void RecordWatch(const std::string& account_id, const wire::WatchReport& report);
  void RecordNotInterested(const std::string& account_id, const std::string& video_id);
  wire::FeedPage SearchFeed(const std::vector<std::string>& query, std::uint32_t count) const;

  AccountState Snapshot(const std::string& account_id) const;
  std::vector<std::string> AccountIds() const;

  const Corpus& corpus() const { return *corpus_; }
  const Calibration& calibration() const { return options_.calibration; }

 private:
  struct Account;

  Account& FindAccount(const std::string& account_id,
                       ErrorCode missing = ErrorCode::kNotFound) const;
  HttpResponse Dispatch(const HttpRequest& request);
  Account& Authenticate(const HttpRequest& request);
  void CheckNonce(Account& account, std::uint64_t nonce);
  SignalKind ClassifyReport(const Video& video, const wire::WatchReport& report) const;

  std::shared_ptr<const Corpus> corpus_;
  PlatformOptions options_;
  std::string master_secret_;

  mutable std::shared_mutex accounts_mu_;
  std::map<std::string, std::unique_ptr<Account>> accounts_;
  std::map<std::string, std::string> key_owner_;  // key_id -> account_id
  std::uint64_t accounts_created_ = 0;

  mutable std::mutex search_mu_;
  mutable std::map<std::string, std::vector<std::uint32_t>> search_cache_;
};

// Renders an account snapshot as the JSON served by the state endpoint.
std::string StateJson(const AccountState& state);

}  // namespace fyp::platform
