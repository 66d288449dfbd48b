#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Message schema for the platform endpoints. Field numbers are part of the
// wire contract and documented in docs/wire_schema.md; never renumber.

namespace fyp::wire {

struct WatchReport {
  std::string video_id;
  std::int64_t watch_duration_ms = 0;
  bool finished = false;

  bool operator==(const WatchReport&) const = default;
};

// POST /aweme/v2/feed
struct FeedRequestBody {
  std::string account_id;
  std::string device_id;
  std::uint64_t session_nonce = 0;
  // Plays since the previous feed request, in emission order.
  std::vector<WatchReport> watch_reports;
  std::int64_t client_timestamp_ms = 0;
  std::uint32_t count = 0;

  bool operator==(const FeedRequestBody&) const = default;
};

enum class VideoOrigin : std::uint8_t { kFyp = 0, kSearch = 1 };

// POST /aweme/v1/aweme/stats
struct StatsBody {
  std::string account_id;
  std::string device_id;
  std::uint64_t session_nonce = 0;
  WatchReport report;
  std::int64_t client_timestamp_ms = 0;
  VideoOrigin origin = VideoOrigin::kFyp;

  bool operator==(const StatsBody&) const = default;
};

enum class FeedbackAction : std::uint8_t { kFinish = 1, kNotInterested = 2 };

// POST /tiktok/v1/realtime/feedback
struct FeedbackBody {
  std::string account_id;
  std::string device_id;
  std::uint64_t session_nonce = 0;
  std::string video_id;
  FeedbackAction action = FeedbackAction::kFinish;
  std::int64_t client_timestamp_ms = 0;

  bool operator==(const FeedbackBody&) const = default;
};

struct AppLogEvent {
  std::string name;
  std::string account_id;
  std::string video_id;
  std::int64_t dwell_ms = 0;

  bool operator==(const AppLogEvent&) const = default;
};

// POST /service/2/app_log/ (encoded, then dictionary-compressed)
struct AppLogBatch {
  std::string account_id;
  std::string device_id;
  std::uint64_t session_nonce = 0;
  std::vector<AppLogEvent> events;
  std::int64_t client_timestamp_ms = 0;

  bool operator==(const AppLogBatch&) const = default;
};

// Public video metadata as served to clients. Ground-truth topics never
// appear on the wire.
struct VideoCard {
  std::string video_id;
  std::string description;
  std::vector<std::string> hashtags;
  std::vector<std::string> suggested_words;
  std::string author_nickname;
  std::string author_signature;
  std::int64_t duration_ms = 0;

  bool operator==(const VideoCard&) const = default;
};

struct FeedPage {
  std::vector<VideoCard> videos;
  std::string page_token;

  bool operator==(const FeedPage&) const = default;
};

struct AccountCredentials {
  std::string account_id;
  std::string device_id;
  std::string key_id;
  std::string key;

  bool operator==(const AccountCredentials&) const = default;
};

std::string Encode(const WatchReport& m);
std::string Encode(const FeedRequestBody& m);
std::string Encode(const StatsBody& m);
std::string Encode(const FeedbackBody& m);
std::string Encode(const AppLogEvent& m);
std::string Encode(const AppLogBatch& m);
std::string Encode(const VideoCard& m);
std::string Encode(const FeedPage& m);
std::string Encode(const AccountCredentials& m);

WatchReport DecodeWatchReport(std::string_view bytes);
FeedRequestBody DecodeFeedRequest(std::string_view bytes);
StatsBody DecodeStats(std::string_view bytes);
FeedbackBody DecodeFeedback(std::string_view bytes);
AppLogBatch DecodeAppLog(std::string_view bytes);
VideoCard DecodeVideoCard(std::string_view bytes);
FeedPage DecodeFeedPage(std::string_view bytes);
AccountCredentials DecodeCredentials(std::string_view bytes);

}  // namespace fyp::wire
