#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fyp/wire/compression.h"
#include "fyp/wire/messages.h"

namespace fyp::wire {

// Event names the client emits into the app log.
inline constexpr std::string_view kEventPlayStart = "video_play";
inline constexpr std::string_view kEventPlayFinish = "video_play_finish";
inline constexpr std::string_view kEventPlayLeave = "video_play_leave";

std::string EncodeAppLogPayload(const AppLogBatch& batch, const Dictionary& dictionary);
AppLogBatch DecodeAppLogPayload(std::string_view compressed, const Dictionary& dictionary);

// Representative event records (encoded AppLogEvents plus batch framing)
// for dictionary training.
std::vector<std::string> SampleEventRecords(std::size_t count, std::uint64_t seed);

// The dictionary a fresh deployment uses when no dictionary file is
// configured: BuildDictionary over SampleEventRecords(4096, 0).
const Dictionary& DefaultEventDictionary();

}  // namespace fyp::wire
