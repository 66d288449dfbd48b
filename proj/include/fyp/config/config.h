#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/platform/corpus.h"
#include "fyp/platform/types.h"

namespace fyp::config {

struct ExperimentPlan {
  std::string topic = "cooking";
  std::uint32_t runs = 5;
  std::uint32_t phase_length = 200;
  std::uint32_t seed_count = 25;
  double confidence = 0.99;
  // Per-run seeds; derived from the master seed when empty.
  std::vector<std::uint64_t> run_seeds;
  std::uint32_t verify_fetch = 200;
  std::uint32_t page_size = 8;
  std::int64_t skip_dwell_min_ms = 200;
  std::int64_t skip_dwell_max_ms = 2000;

  // Throws Error(kConfig) when a count is zero, confidence is outside (0,1),
  // the dwell bounds are inverted, or run_seeds has the wrong length.
  void Validate() const;
  std::uint64_t RunSeed(std::uint64_t master_seed, std::uint32_t run) const;
};

struct Config {
  std::uint64_t seed = 1;
  platform::CorpusOptions corpus;
  std::vector<platform::TopicProfile> topics = platform::DefaultTopicProfiles();
  platform::Calibration calibration;
  // Platform "host:port"; empty runs the platform in process.
  std::string platform_address;
  // App-log dictionary file; empty uses the built-in event dictionary.
  std::string dictionary_path;
  std::string results_dir = "results";
  ExperimentPlan plan;
  std::string classifier_backend = "rule_based";
  classifier::LlmOptions llm;

  void Validate() const;
};

// JSON config. Every key is optional; calibration starts from the named
// "profile" and then applies individual overrides. Unknown keys are
// rejected so typos do not pass silently. Throws Error(kConfig).
Config ParseConfig(const std::string& json_text);
Config LoadConfig(const std::string& path);
// Canonical JSON form (stable key order), re-parseable by ParseConfig.
std::string ConfigToJson(const Config& config);

const platform::TopicProfile& FindTopic(const Config& config, const std::string& topic_id);

}  // namespace fyp::config
