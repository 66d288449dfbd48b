#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fyp/platform/types.h"

namespace fyp::platform {

struct CorpusOptions {
  std::size_t total = 50000;
  std::uint64_t seed = 1;
  // Probability that an on-topic video also carries a second topic.
  double multi_topic_rate = 0.0;
};

// Immutable after construction; share it across threads and platforms.
class Corpus {
 public:
  Corpus(std::vector<TopicProfile> topics, std::vector<Video> videos);

  const std::vector<TopicProfile>& topics() const { return topics_; }
  const std::vector<Video>& videos() const { return videos_; }
  std::size_t size() const { return videos_.size(); }

  // Index into topics(), or nullopt.
  std::optional<std::size_t> TopicIndex(std::string_view topic_id) const;
  const TopicProfile& Topic(std::string_view topic_id) const;

  std::optional<std::uint32_t> IndexOf(std::string_view video_id) const;

  // Video indices carrying topic `topic_index`, in corpus order.
  const std::vector<std::uint32_t>& TopicPool(std::size_t topic_index) const {
    return topic_pools_[topic_index];
  }
  const std::vector<std::uint32_t>& OffTopicPool() const { return off_topic_pool_; }

  // JSON Lines: a header object with the topic profiles, then one video per
  // line. Byte-stable for a given corpus.
  std::string Serialize() const;
  static Corpus Parse(std::string_view text);
  void Save(const std::string& path) const;
  static Corpus Load(const std::string& path);

 private:
  std::vector<TopicProfile> topics_;
  std::vector<Video> videos_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::vector<std::vector<std::uint32_t>> topic_pools_;
  std::vector<std::uint32_t> off_topic_pool_;
};

// Synthesizes a corpus in which each topic appears with its base prevalence.
// On-topic metadata always carries at least one topic keyword; off-topic
// metadata carries none. Throws Error(kConfig) when total == 0, a topic is
// malformed, or prevalences sum past 1.
Corpus GenerateCorpus(const std::vector<TopicProfile>& profiles, const CorpusOptions& options);

void ValidateProfiles(const std::vector<TopicProfile>& profiles);

}  // namespace fyp::platform
