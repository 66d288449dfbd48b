#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fyp/wire/messages.h"

namespace fyp::platform {

struct TopicProfile {
  std::string topic_id;      // e.g. "sports_betting"
  std::string display_name;  // e.g. "sports betting"
  double base_prevalence = 0.0;
  std::vector<std::string> keywords;
};

// The three audit topics with their classification keywords and the
// prevalence a non-personalized feed shows for each.
std::vector<TopicProfile> DefaultTopicProfiles();

struct Video {
  std::string video_id;
  std::string description;
  std::vector<std::string> hashtags;
  std::vector<std::string> suggested_words;
  std::string author_nickname;
  std::string author_signature;
  std::int64_t duration_ms = 0;
  // Ground truth, sorted. Used by corpus generation and evaluation only;
  // never leaves the platform.
  std::vector<std::string> true_topics;

  wire::VideoCard Card() const;
};

enum class SignalKind { kWatchFull, kWatchPartial, kSkip, kNotInterested };

const char* SignalKindName(SignalKind kind);

enum class FeedMode { kScroll, kFetch };

enum class PageSampling { kSystematic, kIid };

// Every tunable of the personalization model lives here.
struct Calibration {
  std::string profile_id = "default";

  double w_watch_full = 1.0;
  double w_watch_partial = 0.25;
  double w_skip = -0.25;
  double w_not_interested = -3.0;

  double score_floor = -10.0;
  double score_cap = 10.0;

  // Slope of the delivery link for non-negative affinity.
  double gain = 0.0425;
  double p_cap = 0.44;
  // p_floor = base_prevalence * p_floor_ratio.
  double p_floor_ratio = 0.25;

  // Multiplier applied to a negative score before a positive signal is
  // added; 1.0 keeps the update purely additive.
  double negative_decay = 1.0;

  std::int64_t skip_threshold_ms = 2000;
  PageSampling sampling = PageSampling::kSystematic;

  // Throws Error(kConfig) when an invariant is violated, including the
  // ordering w_not_interested < w_skip < 0 <= w_watch_partial < w_watch_full.
  void Validate() const;
};

// Named calibration profiles: "default" and "relapse" (negative affinity
// decays toward zero on positive re-engagement).
Calibration CalibrationProfile(const std::string& profile_id);

struct AccountState {
  std::string account_id;
  std::string device_id;
  std::map<std::string, double> affinity;
  std::set<std::string> seen_video_ids;
  std::uint64_t signal_count = 0;
  std::uint64_t last_nonce = 0;
  std::uint64_t scroll_pages = 0;

  bool operator==(const AccountState&) const = default;
};

// Canonical text forms. Doubles use %.17g so equal text means equal bits.
std::string SerializeAffinity(const AccountState& state);
std::string SerializeState(const AccountState& state);
// SHA-256 hex of SerializeState.
std::string StateDigest(const AccountState& state);

}  // namespace fyp::platform
