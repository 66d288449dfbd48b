#include "fyp/platform/service.h"

#include <algorithm>
#include <charconv>

#include "fyp/common/error.h"
#include "fyp/common/seed.h"
#include "fyp/common/text.h"
#include "fyp/platform/personalization.h"
#include "fyp/wire/applog.h"
#include "fyp/wire/endpoints.h"
#include "fyp/wire/signing.h"
#include "nlohmann/json.hpp"

namespace fyp::platform {
namespace {

std::string Hex64(std::uint64_t v) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::uint64_t ParseUint(const std::string& text, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kProtocol, std::string("bad ") + what + " '" + text + "'");
  }
  return value;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDecode:
    case ErrorCode::kEncode:
    case ErrorCode::kProtocol: return 400;
    case ErrorCode::kAuth: return 401;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kIntegrity: return 409;
    default: return 500;
  }
}

HttpResponse ErrorResponse(ErrorCode code, const std::string& message) {
  HttpResponse r;
  r.status = StatusFor(code);
  r.headers.emplace_back("Content-Type", "text/plain");
  r.headers.emplace_back("X-FL-Error", ErrorCodeName(code));
  r.body = std::string(ErrorCodeName(code)) + ": " + message;
  return r;
}

HttpResponse BinaryResponse(std::string body) {
  HttpResponse r;
  r.headers.emplace_back("Content-Type", std::string(wire::kProtobufContentType));
  r.body = std::move(body);
  return r;
}

HttpResponse Ack() {
  HttpResponse r;
  r.headers.emplace_back("Content-Type", "text/plain");
  r.body = "ok";
  return r;
}

}  // namespace

struct PlatformService::Account {
  mutable std::mutex mu;
  AccountState state;
  std::string key_id;
  std::string secret;
  std::uint64_t seed = 0;
};

PlatformService::PlatformService(std::shared_ptr<const Corpus> corpus, PlatformOptions options)
    : corpus_(std::move(corpus)), options_(std::move(options)) {
  if (!corpus_) throw Error(ErrorCode::kConfig, "platform needs a corpus");
  options_.calibration.Validate();
  if (!options_.dictionary) {
    options_.dictionary = std::make_shared<wire::Dictionary>(wire::DefaultEventDictionary());
  }
  master_secret_ = Hex64(DeriveSeed(options_.seed, "master-secret")) +
                   Hex64(DeriveSeed(options_.seed, "master-secret-2"));
}

PlatformService::~PlatformService() = default;

wire::AccountCredentials PlatformService::CreateAccount() {
  std::unique_lock lock(accounts_mu_);
  auto account = std::make_unique<Account>();
  std::string id;
  do {
    id = "u" + Hex64(DeriveSeed(options_.seed, {HashLabel("account"), accounts_created_++}));
  } while (accounts_.contains(id));
  account->state.account_id = id;
  account->state.device_id =
      "d" + Hex64(DeriveSeed(options_.seed, {HashLabel("device"), HashLabel(id)}));
  for (const auto& topic : corpus_->topics()) account->state.affinity[topic.topic_id] = 0.0;
  account->key_id = "k" + wire::HmacSha256Hex(master_secret_, "kid:" + id).substr(0, 16);
  account->secret = wire::HmacSha256Hex(master_secret_, "key:" + id);
  account->seed = DeriveSeed(options_.seed, {HashLabel("account-rng"), HashLabel(id)});

  wire::AccountCredentials creds{id, account->state.device_id, account->key_id, account->secret};
  key_owner_[account->key_id] = id;
  accounts_[id] = std::move(account);
  return creds;
}

PlatformService::Account& PlatformService::FindAccount(const std::string& account_id,
                                                       ErrorCode missing) const {
  std::shared_lock lock(accounts_mu_);
  auto it = accounts_.find(account_id);
  if (it == accounts_.end()) {
    throw Error(missing, "unknown account '" + account_id + "'");
  }
  return *it->second;
}

std::vector<std::string> PlatformService::AccountIds() const {
  std::shared_lock lock(accounts_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : accounts_) ids.push_back(id);
  return ids;
}

AccountState PlatformService::Snapshot(const std::string& account_id) const {
  Account& account = FindAccount(account_id);
  std::lock_guard lock(account.mu);
  return account.state;
}

wire::FeedPage PlatformService::ServeFeed(const std::string& account_id, std::uint32_t count,
                                          FeedMode mode, std::uint64_t cursor) {
  if (count == 0 || count > options_.max_page_size) {
    throw Error(ErrorCode::kProtocol, "page size must be in [1, " +
                                          std::to_string(options_.max_page_size) + "]");
  }
  Account& account = FindAccount(account_id, ErrorCode::kAuth);
  std::lock_guard lock(account.mu);
  const std::uint64_t stream = mode == FeedMode::kScroll ? 1 : 2;
  const std::uint64_t counter = mode == FeedMode::kScroll ? account.state.scroll_pages : cursor;
  Rng rng = MakeRng(DeriveSeed(account.seed, {stream, counter}));
  auto picks = ComposePage(account.state, *corpus_, options_.calibration, count, rng);

  wire::FeedPage page;
  for (auto idx : picks) page.videos.push_back(corpus_->videos()[idx].Card());
  if (mode == FeedMode::kScroll) {
    for (const auto& card : page.videos) account.state.seen_video_ids.insert(card.video_id);
    ++account.state.scroll_pages;
    page.page_token = std::to_string(account.state.scroll_pages);
  } else {
    page.page_token = std::to_string(cursor + 1);
  }
  return page;
}

SignalKind PlatformService::ClassifyReport(const Video& video,
                                           const wire::WatchReport& report) const {
  if (report.watch_duration_ms < 0) {
    throw Error(ErrorCode::kProtocol, "negative watch duration");
  }
  if (report.finished) {
    if (report.watch_duration_ms < video.duration_ms) {
      throw Error(ErrorCode::kProtocol, "finished report shorter than video " + video.video_id);
    }
    return SignalKind::kWatchFull;
  }
  if (report.watch_duration_ms <= options_.calibration.skip_threshold_ms) return SignalKind::kSkip;
  return SignalKind::kWatchPartial;
}

void PlatformService::RecordWatch(const std::string& account_id,
                                  const wire::WatchReport& report) {
  auto idx = corpus_->IndexOf(report.video_id);
  if (!idx) throw Error(ErrorCode::kProtocol, "unknown video '" + report.video_id + "'");
  const Video& video = corpus_->videos()[*idx];
  const SignalKind kind = ClassifyReport(video, report);
  Account& account = FindAccount(account_id, ErrorCode::kAuth);
  std::lock_guard lock(account.mu);
  ApplySignal(account.state, video.true_topics, kind, options_.calibration);
  ++account.state.signal_count;
}

void PlatformService::RecordNotInterested(const std::string& account_id,
                                          const std::string& video_id) {
  auto idx = corpus_->IndexOf(video_id);
  if (!idx) throw Error(ErrorCode::kProtocol, "unknown video '" + video_id + "'");
  const Video& video = corpus_->videos()[*idx];
  Account& account = FindAccount(account_id, ErrorCode::kAuth);
  std::lock_guard lock(account.mu);
  ApplySignal(account.state, video.true_topics, SignalKind::kNotInterested,
              options_.calibration);
  ++account.state.signal_count;
}

wire::FeedPage PlatformService::SearchFeed(const std::vector<std::string>& query,
                                           std::uint32_t count) const {
  std::vector<std::string> terms;
  for (const auto& q : query) {
    if (!q.empty()) terms.push_back(ToLower(q));
  }
  if (terms.empty()) throw Error(ErrorCode::kProtocol, "empty search query");
  const std::string cache_key = Join(terms, "\x1f");

  std::vector<std::uint32_t> ranked;
  {
    std::lock_guard lock(search_mu_);
    auto it = search_cache_.find(cache_key);
    if (it != search_cache_.end()) ranked = it->second;
  }
  if (ranked.empty()) {
    std::vector<std::pair<int, std::uint32_t>> scored;
    const auto& videos = corpus_->videos();
    for (std::uint32_t i = 0; i < videos.size(); ++i) {
      const Video& v = videos[i];
      int matches = 0;
      for (const auto& term : terms) {
        bool hit = ContainsPhrase(v.description, term) ||
                   ContainsPhrase(v.author_nickname, term) ||
                   ContainsPhrase(v.author_signature, term);
        for (const auto& h : v.hashtags) hit = hit || ContainsPhrase(h, term);
        for (const auto& s : v.suggested_words) hit = hit || ContainsPhrase(s, term);
        matches += hit ? 1 : 0;
      }
      if (matches > 0) scored.emplace_back(matches, i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [_, idx] : scored) ranked.push_back(idx);
    std::lock_guard lock(search_mu_);
    search_cache_[cache_key] = ranked;
  }

  wire::FeedPage page;
  for (std::size_t i = 0; i < ranked.size() && i < count; ++i) {
    page.videos.push_back(corpus_->videos()[ranked[i]].Card());
  }
  return page;
}

PlatformService::Account& PlatformService::Authenticate(const HttpRequest& request) {
  auto verdict = wire::VerifyRequest(request, [this](std::string_view key_id)
                                                  -> std::optional<std::string> {
    std::shared_lock lock(accounts_mu_);
    auto owner = key_owner_.find(std::string(key_id));
    if (owner == key_owner_.end()) return std::nullopt;
    return accounts_.at(owner->second)->secret;
  });
  if (!verdict.accepted()) {
    throw Error(ErrorCode::kAuth,
                std::string("signature rejected: ") + wire::RejectReasonName(verdict.reason));
  }
  std::string owner;
  {
    std::shared_lock lock(accounts_mu_);
    owner = key_owner_.at(verdict.key_id);
  }
  auto account_header = FindHeader(request.headers, wire::kAccountHeader);
  if (!account_header || *account_header != owner) {
    throw Error(ErrorCode::kAuth, "signing key does not belong to the claimed account");
  }
  Account& account = FindAccount(owner);
  auto device_header = FindHeader(request.headers, wire::kDeviceHeader);
  if (!device_header || *device_header != account.state.device_id) {
    throw Error(ErrorCode::kAuth, "device id does not match account");
  }
  return account;
}

void PlatformService::CheckNonce(Account& account, std::uint64_t nonce) {
  std::lock_guard lock(account.mu);
  if (nonce <= account.state.last_nonce) {
    throw Error(ErrorCode::kIntegrity, "nonce " + std::to_string(nonce) +
                                           " not above last accepted " +
                                           std::to_string(account.state.last_nonce));
  }
  account.state.last_nonce = nonce;
}

namespace {

void CheckBodyIdentity(const AccountState& state, const std::string& account_id,
                       const std::string& device_id) {
  if (account_id != state.account_id || device_id != state.device_id) {
    throw Error(ErrorCode::kAuth, "body identity does not match the authenticated account");
  }
}

}  // namespace

HttpResponse PlatformService::Dispatch(const HttpRequest& request) {
  const std::string path = PathWithoutQuery(request.path);
  const auto query = ParseQuery(request.path);
  auto param = [&](const char* name) -> std::string {
    auto it = query.find(name);
    if (it == query.end()) throw Error(ErrorCode::kProtocol, std::string("missing ") + name);
    return it->second;
  };

  if (request.method == "POST" && path == wire::kRegisterPath) {
    return BinaryResponse(wire::Encode(CreateAccount()));
  }
  if (request.method == "GET" && path == wire::kStatePath) {
    return [&] {
      HttpResponse r;
      r.headers.emplace_back("Content-Type", "application/json");
      r.body = StateJson(Snapshot(param("account_id")));
      return r;
    }();
  }

  if (request.method == "GET" && path == wire::kFetchFeedPath) {
    Account& account = Authenticate(request);
    auto count = static_cast<std::uint32_t>(ParseUint(param("count"), "count"));
    std::uint64_t cursor = query.contains("cursor") ? ParseUint(param("cursor"), "cursor") : 0;
    return BinaryResponse(
        wire::Encode(ServeFeed(account.state.account_id, count, FeedMode::kFetch, cursor)));
  }
  if (request.method == "GET" && path == wire::kSearchPath) {
    Authenticate(request);
    auto count = static_cast<std::uint32_t>(ParseUint(param("count"), "count"));
    return BinaryResponse(wire::Encode(SearchFeed(Split(param("keyword"), ','), count)));
  }
  if (request.method != "POST") {
    throw Error(ErrorCode::kNotFound, "no route for " + request.method + " " + path);
  }

  if (path == wire::kFeedPath) {
    Account& account = Authenticate(request);
    auto body = wire::DecodeFeedRequest(request.body);
    CheckBodyIdentity(account.state, body.account_id, body.device_id);
    for (const auto& report : body.watch_reports) {
      if (!corpus_->IndexOf(report.video_id)) {
        throw Error(ErrorCode::kProtocol, "feed request reports unknown video " + report.video_id);
      }
    }
    if (body.count == 0 || body.count > options_.max_page_size) {
      throw Error(ErrorCode::kProtocol, "bad page size " + std::to_string(body.count));
    }
    CheckNonce(account, body.session_nonce);
    return BinaryResponse(
        wire::Encode(ServeFeed(body.account_id, body.count, FeedMode::kScroll)));
  }
  if (path == wire::kStatsPath) {
    Account& account = Authenticate(request);
    auto body = wire::DecodeStats(request.body);
    CheckBodyIdentity(account.state, body.account_id, body.device_id);
    if (!corpus_->IndexOf(body.report.video_id)) {
      throw Error(ErrorCode::kProtocol, "unknown video '" + body.report.video_id + "'");
    }
    CheckNonce(account, body.session_nonce);
    RecordWatch(body.account_id, body.report);
    return Ack();
  }
  if (path == wire::kFeedbackPath) {
    Account& account = Authenticate(request);
    auto body = wire::DecodeFeedback(request.body);
    CheckBodyIdentity(account.state, body.account_id, body.device_id);
    if (!corpus_->IndexOf(body.video_id)) {
      throw Error(ErrorCode::kProtocol, "unknown video '" + body.video_id + "'");
    }
    CheckNonce(account, body.session_nonce);
    if (body.action == wire::FeedbackAction::kNotInterested) {
      RecordNotInterested(body.account_id, body.video_id);
    }
    return Ack();
  }
  if (path == wire::kAppLogPath) {
    Account& account = Authenticate(request);
    auto batch = wire::DecodeAppLogPayload(request.body, *options_.dictionary);
    CheckBodyIdentity(account.state, batch.account_id, batch.device_id);
    for (const auto& e : batch.events) {
      if (e.account_id != batch.account_id) {
        throw Error(ErrorCode::kAuth, "app-log event for a different account");
      }
    }
    CheckNonce(account, batch.session_nonce);
    return Ack();
  }
  throw Error(ErrorCode::kNotFound, "no route for POST " + path);
}

HttpResponse PlatformService::Handle(const HttpRequest& request) {
  try {
    return Dispatch(request);
  } catch (const Error& e) {
    return ErrorResponse(e.code(), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(ErrorCode::kInfrastructure, e.what());
  }
}

std::string StateJson(const AccountState& state) {
  nlohmann::json affinity = nlohmann::json::object();
  for (const auto& [topic, score] : state.affinity) affinity[topic] = score;
  nlohmann::json j{{"account_id", state.account_id},
                   {"device_id", state.device_id},
                   {"affinity", affinity},
                   {"affinity_text", SerializeAffinity(state)},
                   {"seen_count", state.seen_video_ids.size()},
                   {"signal_count", state.signal_count},
                   {"last_nonce", state.last_nonce},
                   {"scroll_pages", state.scroll_pages},
                   {"digest", StateDigest(state)}};
  return j.dump();
}

}  // namespace fyp::platform
