#include "fyp/classifier/classifier.h"

#include <cctype>
#include <cstdlib>
#include <thread>

#include "fyp/common/error.h"
#include "fyp/common/text.h"
#include "httplib.h"
#include "nlohmann/json.hpp"

namespace fyp::classifier {

VideoMeta VideoMeta::FromCard(const wire::VideoCard& card) {
  return {card.description, card.hashtags, card.suggested_words, card.author_nickname,
          card.author_signature};
}

bool RuleBasedClassifier::Classify(const VideoMeta& meta, const platform::TopicProfile& topic) {
  for (const auto& keyword : topic.keywords) {
    if (ContainsPhrase(meta.description, keyword) || ContainsPhrase(meta.nickname, keyword) ||
        ContainsPhrase(meta.signature, keyword)) {
      return true;
    }
    for (const auto& h : meta.hashtags) {
      if (ContainsPhrase(h, keyword)) return true;
    }
    for (const auto& w : meta.suggested_words) {
      if (ContainsPhrase(w, keyword)) return true;
    }
  }
  return false;
}

std::string BuildPrompt(const VideoMeta& meta, const platform::TopicProfile& topic) {
  std::string out;
  out += "You are a classifier tasked with determining whether the given content has anything "
         "to do with ";
  out += Join(topic.keywords, ", ");
  out += ". Given a list of: the user who posted a video and a brief description of them; the "
         "video's description; a list of related words; and a list of hashtags, you classify "
         "whether the video is related to ";
  out += topic.display_name;
  out += ". You only respond with 'Yes' if you think it is, or 'No' if not.\n\n";
  out += "Description: " + meta.description;
  out += ", Hashtags: " + Join(meta.hashtags, ", ");
  out += ", Suggested Words: " + Join(meta.suggested_words, ", ");
  out += ", Nickname: " + meta.nickname;
  out += ", Signature: " + meta.signature;
  return out;
}

bool ParseYesNo(std::string_view answer) {
  std::size_t i = 0;
  while (i < answer.size() && std::isspace(static_cast<unsigned char>(answer[i]))) ++i;
  auto rest = ToLower(answer.substr(i));
  auto followed_cleanly = [&](std::size_t n) {
    return rest.size() == n || !std::isalnum(static_cast<unsigned char>(rest[n]));
  };
  if (rest.starts_with("yes") && followed_cleanly(3)) return true;
  if (rest.starts_with("no") && followed_cleanly(2)) return false;
  throw Error(ErrorCode::kClassifier, "unparseable classifier answer: '" + std::string(answer) + "'");
}

LlmClassifier::LlmClassifier(LlmOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw Error(ErrorCode::kConfig, "LLM endpoint not configured");
  if (options_.max_requests_per_second <= 0) {
    throw Error(ErrorCode::kConfig, "LLM rate limit must be positive");
  }
  if (const char* key = std::getenv(options_.api_key_env.c_str())) api_key_ = key;
}

LlmClassifier::~LlmClassifier() = default;

void LlmClassifier::Throttle() {
  using namespace std::chrono;
  const auto interval = duration_cast<steady_clock::duration>(
      duration<double>(1.0 / options_.max_requests_per_second));
  steady_clock::time_point slot;
  {
    std::lock_guard lock(rate_mu_);
    auto now = steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

bool LlmClassifier::Classify(const VideoMeta& meta, const platform::TopicProfile& topic) {
  std::string url = options_.endpoint;
  std::string scheme_host;
  std::string path = "/";
  auto scheme = url.find("://");
  auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash == std::string::npos) {
    scheme_host = url;
  } else {
    scheme_host = url.substr(0, slash);
    path = url.substr(slash);
  }

  nlohmann::json request{{"model", options_.model},
                         {"temperature", 0},
                         {"messages", {{{"role", "user"}, {"content", BuildPrompt(meta, topic)}}}}};
  Throttle();
  httplib::Client client(scheme_host);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_tcp_nodelay(true);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto result = client.Post(path, headers, request.dump(), "application/json");
  if (!result) {
    throw Error(ErrorCode::kClassifier,
                "LLM request failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kClassifier, "LLM endpoint returned " + std::to_string(result->status));
  }
  std::string answer;
  try {
    auto j = nlohmann::json::parse(result->body);
    answer = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kClassifier, std::string("malformed LLM response: ") + e.what());
  }
  return ParseYesNo(answer);
}

std::unique_ptr<Classifier> MakeClassifier(const std::string& backend, const LlmOptions& llm) {
  if (backend == "rule_based") return std::make_unique<RuleBasedClassifier>();
  if (backend == "external_llm") return std::make_unique<LlmClassifier>(llm);
  throw Error(ErrorCode::kConfig, "unknown classifier backend '" + backend + "'");
}

}  // namespace fyp::classifier
