#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fyp/platform/types.h"
#include "fyp/wire/messages.h"

namespace fyp::classifier {

// The public metadata a classifier sees for one video.
struct VideoMeta {
  std::string description;
  std::vector<std::string> hashtags;
  std::vector<std::string> suggested_words;
  std::string nickname;
  std::string signature;

  static VideoMeta FromCard(const wire::VideoCard& card);
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  // Throws Error(kClassifier) when no answer can be obtained.
  virtual bool Classify(const VideoMeta& meta, const platform::TopicProfile& topic) = 0;
  virtual std::string name() const = 0;
};

// On-topic iff some keyword occurs (case-insensitive, on word boundaries)
// in some metadata field.
class RuleBasedClassifier : public Classifier {
 public:
  bool Classify(const VideoMeta& meta, const platform::TopicProfile& topic) override;
  std::string name() const override { return "rule_based"; }
};

// Fills the classification prompt template for `meta` and `topic`.
std::string BuildPrompt(const VideoMeta& meta, const platform::TopicProfile& topic);

// Parses a model answer: a case-insensitive leading "yes" or "no" followed
// by nothing alphanumeric. Anything else throws Error(kClassifier).
bool ParseYesNo(std::string_view answer);

struct LlmOptions {
  // Chat-completions URL, e.g. "http://127.0.0.1:8080/v1/chat/completions".
  std::string endpoint;
  std::string model = "gpt-4o-mini";
  // Name of the environment variable holding the API key; the key may be
  // absent for local endpoints.
  std::string api_key_env = "FYP_LLM_API_KEY";
  double max_requests_per_second = 5.0;
  int timeout_seconds = 30;
};

// Asks a chat-completion style HTTP endpoint.
class LlmClassifier : public Classifier {
 public:
  explicit LlmClassifier(LlmOptions options);
  ~LlmClassifier() override;

  bool Classify(const VideoMeta& meta, const platform::TopicProfile& topic) override;
  std::string name() const override { return "external_llm"; }

 private:
  void Throttle();

  LlmOptions options_;
  std::string api_key_;
  std::mutex rate_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

// "rule_based" or "external_llm". Throws Error(kConfig) otherwise.
std::unique_ptr<Classifier> MakeClassifier(const std::string& backend, const LlmOptions& llm);

}  // namespace fyp::classifier
