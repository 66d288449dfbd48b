#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/client/client.h"
#include "fyp/common/clock.h"
#include "fyp/common/seed.h"
#include "fyp/platform/types.h"

namespace fyp::puppet {

enum class Role {
  kWatchTopic,
  kBaselineSkip,
  kGivesImplicit,
  kGivesExplicit,
  kCeasesImplicit,
  kCeasesExplicit,
};

const char* RoleName(Role role);
// Throws Error(kConfig) for unknown names.
Role ParseRole(const std::string& name);

enum class Action { kWatchFull, kSkip, kNotInterestedAfterWatch };

const char* ActionName(Action action);

// Table of behaviors: watch_topic and ceases_* watch on-topic videos and skip
// the rest; baseline_skip and gives_implicit skip everything; gives_explicit
// watches on-topic videos, then marks them not interested.
Action DecideAction(Role role, bool on_topic);

struct BehaviorPolicy {
  Role role = Role::kBaselineSkip;
  std::string topic_id;
  std::uint32_t phase_length = 200;
  std::uint32_t seed_count = 25;

  void Validate() const;
};

struct LogEntry {
  std::uint32_t index = 0;  // 1-based
  std::string video_id;
  bool on_topic = false;
  Action action = Action::kSkip;
  // Skip dwell, or the full duration for watches.
  std::int64_t dwell_ms = 0;

  bool operator==(const LogEntry&) const = default;
};

struct BehaviorLog {
  std::string account_id;
  std::string role;
  std::string topic_id;
  std::string phase;
  std::vector<LogEntry> entries;
  std::vector<std::string> warnings;

  std::vector<bool> OnTopic() const;
  std::uint32_t OnTopicCount() const;

  // One JSON object per line: a header line, then one line per entry.
  std::string ToJsonl() const;
  static BehaviorLog FromJsonl(const std::string& text);
  void Save(const std::string& path) const;
  static BehaviorLog Load(const std::string& path);
};

struct AgentOptions {
  std::uint64_t seed = 1;
  // Videos requested per scroll-mode feed request.
  std::uint32_t page_size = 8;
  std::int64_t skip_dwell_min_ms = 200;
  std::int64_t skip_dwell_max_ms = 2000;
  // Pause between finishing one video and the next feed request.
  std::int64_t scroll_gap_ms = 400;
  std::int64_t clock_start_ms = 1742169600000;  // 2025-03-17T00:00:00Z
};

// Drives one account. Strictly sequential; one agent per account.
class Agent {
 public:
  Agent(Transport& transport, wire::AccountCredentials credentials,
        std::shared_ptr<const wire::Dictionary> dictionary, classifier::Classifier& classifier,
        platform::TopicProfile topic, AgentOptions options);

  // Searches the topic keywords and fully watches the first `seed_count`
  // results; reports carry the search origin. Fewer results: watches what
  // there is and logs a warning.
  BehaviorLog SeedAccount(std::uint32_t seed_count);

  // Scrolls `policy.phase_length` FYP videos acting per DecideAction. On
  // error the entries completed so far are in `log` and the error
  // propagates.
  void RunPhase(const BehaviorPolicy& policy, const std::string& phase, BehaviorLog& log);
  BehaviorLog RunPhase(const BehaviorPolicy& policy, const std::string& phase);

  client::PlatformClient& client() { return client_; }
  LogicalClock& clock() { return clock_; }

 private:
  bool Classify(const wire::VideoCard& card, BehaviorLog& log);
  void Watch(const wire::VideoCard& card, wire::VideoOrigin origin);

  LogicalClock clock_;
  client::PlatformClient client_;
  classifier::Classifier& classifier_;
  platform::TopicProfile topic_;
  AgentOptions options_;
  Rng rng_;
  std::vector<wire::WatchReport> pending_reports_;
};

}  // namespace fyp::puppet
