#pragma once

#include <string_view>

namespace fyp::wire {

// Scroll-mode feed; carries a FeedRequestBody and mutates account state.
inline constexpr std::string_view kFeedPath = "/aweme/v2/feed";
// Fetch-mode feed (GET, ?count=&cursor=); read-only.
inline constexpr std::string_view kFetchFeedPath = "/api/v2/feed";
inline constexpr std::string_view kStatsPath = "/aweme/v1/aweme/stats";
inline constexpr std::string_view kFeedbackPath = "/tiktok/v1/realtime/feedback";
inline constexpr std::string_view kAppLogPath = "/service/2/app_log/";
// Search (GET, ?keyword=k1,k2&count=).
inline constexpr std::string_view kSearchPath = "/aweme/v1/search/item/";
// Unsigned account onboarding.
inline constexpr std::string_view kRegisterPath = "/passport/v1/account/register";
// Unsigned admin view of an account's state (?account_id=); JSON.
inline constexpr std::string_view kStatePath = "/debug/v1/account/state";

inline constexpr std::string_view kProtobufContentType = "application/x-protobuf";
inline constexpr std::string_view kAppLogContentType = "application/octet-stream;tt-data=b";

}  // namespace fyp::wire
