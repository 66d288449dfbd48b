#include "fyp/platform/types.h"

#include <openssl/evp.h>

#include <cmath>

#include "fyp/common/error.h"
#include "fyp/common/text.h"

namespace fyp::platform {

std::vector<TopicProfile> DefaultTopicProfiles() {
  return {
      {"cooking", "cooking", 0.085,
       {"cooking", "recipes", "viral recipes", "cooking tips", "baking"}},
      {"fitness", "fitness", 0.015, {"fitness", "health", "exercise"}},
      {"sports_betting", "sports betting", 0.015,
       {"sports betting", "parlay", "fantasy sports", "sports gambling"}},
  };
}

wire::VideoCard Video::Card() const {
  wire::VideoCard card;
  card.video_id = video_id;
  card.description = description;
  card.hashtags = hashtags;
  card.suggested_words = suggested_words;
  card.author_nickname = author_nickname;
  card.author_signature = author_signature;
  card.duration_ms = duration_ms;
  return card;
}

const char* SignalKindName(SignalKind kind) {
  switch (kind) {
    case SignalKind::kWatchFull: return "watch_full";
    case SignalKind::kWatchPartial: return "watch_partial";
    case SignalKind::kSkip: return "skip";
    case SignalKind::kNotInterested: return "not_interested";
  }
  return "unknown";
}

void Calibration::Validate() const {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kConfig, "calibration '" + profile_id + "': " + what);
  };
  for (double v : {w_watch_full, w_watch_partial, w_skip, w_not_interested, score_floor,
                   score_cap, gain, p_cap, p_floor_ratio, negative_decay}) {
    if (!std::isfinite(v)) fail("non-finite constant");
  }
  if (!(w_not_interested < w_skip && w_skip < 0.0 && 0.0 <= w_watch_partial &&
        w_watch_partial < w_watch_full)) {
    fail("signal weights must satisfy w_not_interested < w_skip < 0 <= w_watch_partial < "
         "w_watch_full");
  }
  if (!(score_floor < 0.0 && 0.0 < score_cap)) fail("need score_floor < 0 < score_cap");
  if (!(gain > 0.0)) fail("gain must be positive");
  if (!(p_cap > 0.0 && p_cap <= 1.0)) fail("p_cap must be in (0, 1]");
  if (!(p_floor_ratio >= 0.0 && p_floor_ratio <= 1.0)) fail("p_floor_ratio must be in [0, 1]");
  if (!(negative_decay > 0.0 && negative_decay <= 1.0)) fail("negative_decay must be in (0, 1]");
  if (skip_threshold_ms < 0) fail("skip_threshold_ms must be >= 0");
}

Calibration CalibrationProfile(const std::string& profile_id) {
  Calibration c;
  if (profile_id == "default") return c;
  if (profile_id == "relapse") {
    c.profile_id = "relapse";
    c.negative_decay = 0.8;
    return c;
  }
  throw Error(ErrorCode::kConfig, "unknown calibration profile '" + profile_id + "'");
}

std::string SerializeAffinity(const AccountState& state) {
  std::string out;
  for (const auto& [topic, score] : state.affinity) {
    out += topic;
    out += '=';
    out += FormatExact(score);
    out += '\n';
  }
  return out;
}

std::string SerializeState(const AccountState& state) {
  std::string out;
  out += "account_id=" + state.account_id + "\n";
  out += "device_id=" + state.device_id + "\n";
  out += "[affinity]\n";
  out += SerializeAffinity(state);
  out += "[seen]\n";
  for (const auto& id : state.seen_video_ids) out += id + "\n";
  out += "signal_count=" + std::to_string(state.signal_count) + "\n";
  out += "last_nonce=" + std::to_string(state.last_nonce) + "\n";
  out += "scroll_pages=" + std::to_string(state.scroll_pages) + "\n";
  return out;
}

std::string StateDigest(const AccountState& state) {
  const std::string text = SerializeState(state);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

}  // namespace fyp::platform
