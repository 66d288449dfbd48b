#include "fyp/wire/applog.h"

#include <random>

#include "fyp/common/seed.h"

namespace fyp::wire {

std::string EncodeAppLogPayload(const AppLogBatch& batch, const Dictionary& dictionary) {
  return CompressPayload(Encode(batch), dictionary);
}

AppLogBatch DecodeAppLogPayload(std::string_view compressed, const Dictionary& dictionary) {
  return DecodeAppLog(DecompressPayload(compressed, dictionary));
}

std::vector<std::string> SampleEventRecords(std::size_t count, std::uint64_t seed) {
  Rng rng = MakeRng(DeriveSeed(seed, "applog-samples"));
  std::uniform_int_distribution<std::uint64_t> id(100000000000000000ULL, 999999999999999999ULL);
  std::uniform_int_distribution<std::int64_t> dwell(200, 60000);
  std::uniform_int_distribution<int> which(0, 2);
  const std::string_view names[] = {kEventPlayStart, kEventPlayFinish, kEventPlayLeave};

  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    AppLogEvent e;
    e.name = std::string(names[which(rng)]);
    e.account_id = "u" + std::to_string(id(rng));
    e.video_id = "7" + std::to_string(id(rng));
    e.dwell_ms = dwell(rng);
    out.push_back(Encode(e));
  }
  // Field tags and names recur in every payload; repeat them so the builder
  // ranks them as the most valuable material.
  for (auto name : names) {
    AppLogEvent bare;
    bare.name = std::string(name);
    for (int k = 0; k < 64; ++k) out.push_back(Encode(bare));
  }
  return out;
}

const Dictionary& DefaultEventDictionary() {
  static const Dictionary kDictionary = BuildDictionary(SampleEventRecords(4096, 0));
  return kDictionary;
}

}  // namespace fyp::wire
