#include "fyp/clone/clone.h"

#include <thread>

#include "fyp/client/client.h"
#include "fyp/wire/applog.h"
#include "fyp/wire/endpoints.h"
#include "nlohmann/json.hpp"

namespace fyp::clone {
namespace {

std::string RewriteBody(const std::string& path, const std::string& body,
                        const IdentityRewrite& rw, const wire::Dictionary& dictionary) {
  const auto& target = rw.target;
  if (path == wire::kFeedPath) {
    auto b = wire::DecodeFeedRequest(body);
    b.account_id = target.account_id;
    b.device_id = target.device_id;
    return wire::Encode(b);
  }
  if (path == wire::kStatsPath) {
    auto b = wire::DecodeStats(body);
    b.account_id = target.account_id;
    b.device_id = target.device_id;
    return wire::Encode(b);
  }
  if (path == wire::kFeedbackPath) {
    auto b = wire::DecodeFeedback(body);
    b.account_id = target.account_id;
    b.device_id = target.device_id;
    return wire::Encode(b);
  }
  if (path == wire::kAppLogPath) {
    auto b = wire::DecodeAppLogPayload(body, dictionary);
    b.account_id = target.account_id;
    b.device_id = target.device_id;
    for (auto& e : b.events) {
      if (e.account_id == rw.source_account_id) e.account_id = target.account_id;
    }
    return wire::EncodeAppLogPayload(b, dictionary);
  }
  throw Error(ErrorCode::kProtocol, "not a signal endpoint: " + path);
}

bool Contains(std::string_view haystack, std::string_view needle) {
  return !needle.empty() && haystack.find(needle) != std::string_view::npos;
}

std::uint64_t NonceOf(const proxy::RecordedExchange& e, const wire::Dictionary& dictionary) {
  const std::string path = PathWithoutQuery(e.path);
  if (path == wire::kFeedPath) return wire::DecodeFeedRequest(e.request_body).session_nonce;
  if (path == wire::kStatsPath) return wire::DecodeStats(e.request_body).session_nonce;
  if (path == wire::kFeedbackPath) return wire::DecodeFeedback(e.request_body).session_nonce;
  if (path == wire::kAppLogPath) {
    return wire::DecodeAppLogPayload(e.request_body, dictionary).session_nonce;
  }
  return 0;
}

}  // namespace

proxy::SignalTrace RewriteTrace(const proxy::SignalTrace& trace, const IdentityRewrite& rw,
                                const wire::Dictionary& dictionary) {
  const wire::KeyLookup source_lookup =
      [&](std::string_view key_id) -> std::optional<std::string> {
    if (key_id == rw.source_key.key_id) return rw.source_key.secret;
    return std::nullopt;
  };
  const bool same_identity = rw.source_account_id == rw.target.account_id &&
                             rw.source_device_id == rw.target.device_id;

  proxy::SignalTrace out;
  out.account_id = rw.target.account_id;
  out.device_id = rw.target.device_id;
  for (const auto& e : trace.exchanges) {
    auto verdict = wire::VerifyRequest(e.Request(), source_lookup);
    if (!verdict.accepted()) {
      throw Error(ErrorCode::kIntegrity, "exchange " + std::to_string(e.sequence_no) +
                                             " fails source verification: " +
                                             wire::RejectReasonName(verdict.reason));
    }
    proxy::RecordedExchange r = e;
    r.request_body = RewriteBody(PathWithoutQuery(e.path), e.request_body, rw, dictionary);
    SetHeader(r.request_headers, wire::kAccountHeader, rw.target.account_id);
    SetHeader(r.request_headers, wire::kDeviceHeader, rw.target.device_id);
    HttpRequest request = r.Request();
    wire::SignInPlace(request, {rw.target.key_id, rw.target.key});
    r.request_headers = std::move(request.headers);

    if (!same_identity) {
      std::string plain_body = r.request_body;
      if (PathWithoutQuery(r.path) == wire::kAppLogPath) {
        plain_body = wire::DecompressPayload(r.request_body, dictionary);
      }
      bool leaked = false;
      for (const auto& id : {rw.source_account_id, rw.source_device_id, rw.source_key.key_id}) {
        leaked = leaked || Contains(plain_body, id) || Contains(r.path, id);
        for (const auto& [k, v] : r.request_headers) leaked = leaked || Contains(v, id);
      }
      if (leaked) {
        throw Error(ErrorCode::kIntegrity, "source identity survives rewrite of exchange " +
                                               std::to_string(e.sequence_no));
      }
    }
    out.exchanges.push_back(std::move(r));
  }
  return out;
}

ReplayReport Replay(const proxy::SignalTrace& trace, Transport& platform,
                    const ReplayOptions& options) {
  ReplayReport report;
  std::int64_t previous_ts = 0;
  bool first = true;
  for (const auto& e : trace.exchanges) {
    if (!first && options.pacing != Pacing::kNone) {
      double gap_ms = static_cast<double>(std::max<std::int64_t>(0, e.timestamp_ms - previous_ts));
      if (options.pacing == Pacing::kScaled) gap_ms *= options.scale;
      std::this_thread::sleep_for(std::chrono::microseconds(static_cast<std::int64_t>(gap_ms * 1000)));
    }
    first = false;
    previous_ts = e.timestamp_ms;

    HttpRequest request = e.Request();
    ++report.sent;
    HttpResponse response = platform.RoundTrip(request);
    if (response.status < 200 || response.status >= 300) {
      ErrorCode code = response.status == 409   ? ErrorCode::kIntegrity
                       : response.status == 401 ? ErrorCode::kAuth
                       : response.status == 404 ? ErrorCode::kNotFound
                       : response.status == 400 ? ErrorCode::kProtocol
                                                : ErrorCode::kInfrastructure;
      throw ReplayError(code, e.sequence_no,
                        std::to_string(response.status) + " " + response.body);
    }
    ++report.accepted;
  }
  return report;
}

std::uint64_t MaxNonce(const proxy::SignalTrace& trace, const wire::Dictionary& dictionary) {
  std::uint64_t max_nonce = 0;
  for (const auto& e : trace.exchanges) max_nonce = std::max(max_nonce, NonceOf(e, dictionary));
  return max_nonce;
}

CloneVerdict VerifyClones(Transport& platform, const wire::AccountCredentials& original,
                          const std::vector<wire::AccountCredentials>& clones,
                          const std::vector<wire::AccountCredentials>& baselines,
                          const platform::TopicProfile& topic,
                          classifier::Classifier& classifier, const VerifyOptions& options) {
  if (clones.empty() || baselines.empty()) {
    throw Error(ErrorCode::kConfig, "verification needs at least one clone and one baseline");
  }
  CloneVerdict verdict;
  verdict.topic_id = topic.topic_id;
  verdict.confidence = options.confidence;

  auto measure = [&](const wire::AccountCredentials& creds, const char* role) {
    AccountMeasurement m;
    m.account_id = creds.account_id;
    m.role = role;
    m.digest_before = client::FetchAccountView(platform, creds.account_id).digest;
    client::PlatformClient c(platform, creds, nullptr, WallClockMs);
    auto page = c.Fetch(options.fetch_count, options.cursor);
    m.fetched = page.videos.size();
    for (const auto& card : page.videos) {
      bool on_topic = false;
      try {
        on_topic = classifier.Classify(classifier::VideoMeta::FromCard(card), topic);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kClassifier) throw;
      }
      m.on_topic += on_topic ? 1 : 0;
    }
    if (m.fetched == 0) {
      throw Error(ErrorCode::kInfrastructure, "fetch returned no videos for " + creds.account_id);
    }
    m.interval = stats::AgrestiCoull(m.on_topic, m.fetched, options.confidence);
    m.digest_after = client::FetchAccountView(platform, creds.account_id).digest;
    verdict.state_unchanged = verdict.state_unchanged && m.digest_before == m.digest_after;
    verdict.accounts.push_back(std::move(m));
  };
  measure(original, "original");
  for (const auto& c : clones) measure(c, "clone");
  for (const auto& b : baselines) measure(b, "baseline");

  const auto& acc = verdict.accounts;
  verdict.overlaps.assign(acc.size(), std::vector<bool>(acc.size(), false));
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (std::size_t j = 0; j < acc.size(); ++j) {
      verdict.overlaps[i][j] = acc[i].interval.Overlaps(acc[j].interval);
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i].role != "clone") continue;
    if (!verdict.overlaps[i][0]) {
      verdict.failing.push_back({acc[i].account_id, acc[0].account_id, "clone misses original"});
    }
    for (std::size_t j = 0; j < acc.size(); ++j) {
      if (acc[j].role == "baseline" && verdict.overlaps[i][j]) {
        verdict.failing.push_back({acc[i].account_id, acc[j].account_id, "clone overlaps baseline"});
      }
    }
  }
  verdict.pass = verdict.failing.empty();
  return verdict;
}

std::string CloneVerdict::ToJson() const {
  nlohmann::json j;
  j["topic"] = topic_id;
  j["confidence"] = confidence;
  j["pass"] = pass;
  j["state_unchanged"] = state_unchanged;
  nlohmann::json accounts_json = nlohmann::json::array();
  for (const auto& a : accounts) {
    accounts_json.push_back({{"account_id", a.account_id},
                             {"role", a.role},
                             {"on_topic", a.on_topic},
                             {"fetched", a.fetched},
                             {"ci_lo", a.interval.lo},
                             {"ci_hi", a.interval.hi},
                             {"digest_before", a.digest_before},
                             {"digest_after", a.digest_after}});
  }
  j["accounts"] = accounts_json;
  j["overlaps"] = overlaps;
  nlohmann::json failing_json = nlohmann::json::array();
  for (const auto& f : failing) failing_json.push_back({{"a", f.a}, {"b", f.b}, {"reason", f.reason}});
  j["failing_pairs"] = failing_json;
  return j.dump(2);
}

}  // namespace fyp::clone
