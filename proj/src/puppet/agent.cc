#include "fyp/puppet/agent.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fyp/common/error.h"
#include "fyp/wire/applog.h"
#include "nlohmann/json.hpp"

namespace fyp::puppet {

const char* RoleName(Role role) {
  switch (role) {
    case Role::kWatchTopic: return "watch_topic";
    case Role::kBaselineSkip: return "baseline_skip";
    case Role::kGivesImplicit: return "gives_implicit";
    case Role::kGivesExplicit: return "gives_explicit";
    case Role::kCeasesImplicit: return "ceases_implicit";
    case Role::kCeasesExplicit: return "ceases_explicit";
  }
  return "unknown";
}

Role ParseRole(const std::string& name) {
  for (Role r : {Role::kWatchTopic, Role::kBaselineSkip, Role::kGivesImplicit,
                 Role::kGivesExplicit, Role::kCeasesImplicit, Role::kCeasesExplicit}) {
    if (name == RoleName(r)) return r;
  }
  throw Error(ErrorCode::kConfig, "unknown role '" + name + "'");
}

const char* ActionName(Action action) {
  switch (action) {
    case Action::kWatchFull: return "watch_full";
    case Action::kSkip: return "skip";
    case Action::kNotInterestedAfterWatch: return "not_interested_after_watch";
  }
  return "unknown";
}

namespace {

Action ParseAction(const std::string& name) {
  for (Action a : {Action::kWatchFull, Action::kSkip, Action::kNotInterestedAfterWatch}) {
    if (name == ActionName(a)) return a;
  }
  throw Error(ErrorCode::kDecode, "unknown action '" + name + "'");
}

}  // namespace

Action DecideAction(Role role, bool on_topic) {
  switch (role) {
    case Role::kWatchTopic:
    case Role::kCeasesImplicit:
    case Role::kCeasesExplicit:
      return on_topic ? Action::kWatchFull : Action::kSkip;
    case Role::kBaselineSkip:
    case Role::kGivesImplicit:
      return Action::kSkip;
    case Role::kGivesExplicit:
      return on_topic ? Action::kNotInterestedAfterWatch : Action::kSkip;
  }
  return Action::kSkip;
}

void BehaviorPolicy::Validate() const {
  if (phase_length < 1) throw Error(ErrorCode::kConfig, "phase_length must be at least 1");
  if (topic_id.empty()) throw Error(ErrorCode::kConfig, "policy needs a topic");
}

std::vector<bool> BehaviorLog::OnTopic() const {
  std::vector<bool> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.on_topic);
  return out;
}

std::uint32_t BehaviorLog::OnTopicCount() const {
  std::uint32_t n = 0;
  for (const auto& e : entries) n += e.on_topic ? 1 : 0;
  return n;
}

std::string BehaviorLog::ToJsonl() const {
  std::string out;
  nlohmann::ordered_json header{{"account_id", account_id}, {"role", role},
                                {"topic", topic_id},        {"phase", phase},
                                {"entries", entries.size()}, {"warnings", warnings}};
  out += header.dump() + "\n";
  for (const auto& e : entries) {
    nlohmann::ordered_json line{{"index", e.index},
                                {"video_id", e.video_id},
                                {"on_topic", e.on_topic},
                                {"action", ActionName(e.action)},
                                {"dwell_ms", e.dwell_ms}};
    out += line.dump() + "\n";
  }
  return out;
}

BehaviorLog BehaviorLog::FromJsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  BehaviorLog log;
  bool have_header = false;
  std::size_t declared = 0;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      if (!have_header) {
        log.account_id = j.at("account_id").get<std::string>();
        log.role = j.at("role").get<std::string>();
        log.topic_id = j.at("topic").get<std::string>();
        log.phase = j.at("phase").get<std::string>();
        declared = j.at("entries").get<std::size_t>();
        log.warnings = j.at("warnings").get<std::vector<std::string>>();
        have_header = true;
        continue;
      }
      LogEntry e;
      e.index = j.at("index").get<std::uint32_t>();
      e.video_id = j.at("video_id").get<std::string>();
      e.on_topic = j.at("on_topic").get<bool>();
      e.action = ParseAction(j.at("action").get<std::string>());
      e.dwell_ms = j.at("dwell_ms").get<std::int64_t>();
      log.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string("bad behavior log: ") + e.what());
  }
  if (!have_header) throw Error(ErrorCode::kDecode, "behavior log has no header line");
  if (declared != log.entries.size()) {
    throw Error(ErrorCode::kDecode, "behavior log declares " + std::to_string(declared) +
                                        " entries but holds " +
                                        std::to_string(log.entries.size()));
  }
  return log;
}

void BehaviorLog::Save(const std::string& path) const {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInfrastructure, "cannot write " + path);
  out << ToJsonl();
}

BehaviorLog BehaviorLog::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return FromJsonl(ss.str());
}

Agent::Agent(Transport& transport, wire::AccountCredentials credentials,
             std::shared_ptr<const wire::Dictionary> dictionary,
             classifier::Classifier& classifier, platform::TopicProfile topic,
             AgentOptions options)
    : clock_(options.clock_start_ms),
      client_(transport, std::move(credentials), std::move(dictionary), clock_.AsFunction()),
      classifier_(classifier),
      topic_(std::move(topic)),
      options_(options),
      rng_(MakeRng(DeriveSeed(options.seed, "agent"))) {
  if (options_.page_size == 0) throw Error(ErrorCode::kConfig, "page_size must be positive");
  if (options_.skip_dwell_min_ms < 0 || options_.skip_dwell_max_ms < options_.skip_dwell_min_ms) {
    throw Error(ErrorCode::kConfig, "bad skip dwell bounds");
  }
}

bool Agent::Classify(const wire::VideoCard& card, BehaviorLog& log) {
  try {
    return classifier_.Classify(classifier::VideoMeta::FromCard(card), topic_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kClassifier) throw;
    log.warnings.push_back("classifier failed on " + card.video_id + ", treated as off-topic: " +
                           e.what());
    return false;
  }
}

void Agent::Watch(const wire::VideoCard& card, wire::VideoOrigin origin) {
  clock_.Advance(card.duration_ms);
  wire::WatchReport report{card.video_id, card.duration_ms, true};
  client_.ReportWatch(report, origin);
  if (origin == wire::VideoOrigin::kFyp) pending_reports_.push_back(report);
}

BehaviorLog Agent::SeedAccount(std::uint32_t seed_count) {
  BehaviorLog log;
  log.account_id = client_.credentials().account_id;
  log.role = "seed";
  log.topic_id = topic_.topic_id;
  log.phase = "seed";
  if (seed_count == 0) return log;
  auto page = client_.Search(topic_.keywords, seed_count);
  if (page.videos.size() < seed_count) {
    log.warnings.push_back("search returned " + std::to_string(page.videos.size()) + " of " +
                           std::to_string(seed_count) + " seed videos");
  }
  std::uint32_t index = 0;
  for (const auto& card : page.videos) {
    bool on_topic = Classify(card, log);
    Watch(card, wire::VideoOrigin::kSearch);
    log.entries.push_back({++index, card.video_id, on_topic, Action::kWatchFull, card.duration_ms});
  }
  return log;
}

void Agent::RunPhase(const BehaviorPolicy& policy, const std::string& phase, BehaviorLog& log) {
  policy.Validate();
  log.account_id = client_.credentials().account_id;
  log.role = RoleName(policy.role);
  log.topic_id = policy.topic_id;
  log.phase = phase;
  std::uniform_int_distribution<std::int64_t> dwell(options_.skip_dwell_min_ms,
                                                    options_.skip_dwell_max_ms);

  std::uint32_t done = 0;
  while (done < policy.phase_length) {
    clock_.Advance(options_.scroll_gap_ms);
    std::uint32_t want = std::min(options_.page_size, policy.phase_length - done);
    auto page = client_.Scroll(want, std::move(pending_reports_));
    pending_reports_.clear();
    if (page.videos.empty()) {
      log.warnings.push_back("feed exhausted after " + std::to_string(done) + " videos");
      throw Error(ErrorCode::kInfrastructure, "feed exhausted for " + log.account_id);
    }
    for (const auto& card : page.videos) {
      if (done == policy.phase_length) break;
      bool on_topic = Classify(card, log);
      Action action = DecideAction(policy.role, on_topic);
      LogEntry entry{++done, card.video_id, on_topic, action, 0};
      std::vector<wire::AppLogEvent> events;
      events.push_back({std::string(wire::kEventPlayStart), log.account_id, card.video_id, 0});
      if (action == Action::kSkip) {
        entry.dwell_ms = dwell(rng_);
        clock_.Advance(entry.dwell_ms);
        wire::WatchReport report{card.video_id, entry.dwell_ms, false};
        client_.ReportWatch(report);
        pending_reports_.push_back(report);
        events.push_back(
            {std::string(wire::kEventPlayLeave), log.account_id, card.video_id, entry.dwell_ms});
        client_.SendAppLog(std::move(events));
      } else {
        entry.dwell_ms = card.duration_ms;
        Watch(card, wire::VideoOrigin::kFyp);
        client_.SendFeedback(card.video_id, wire::FeedbackAction::kFinish);
        events.push_back(
            {std::string(wire::kEventPlayFinish), log.account_id, card.video_id, card.duration_ms});
        client_.SendAppLog(std::move(events));
        if (action == Action::kNotInterestedAfterWatch) {
          client_.SendFeedback(card.video_id, wire::FeedbackAction::kNotInterested);
        }
      }
      log.entries.push_back(std::move(entry));
    }
  }
}

BehaviorLog Agent::RunPhase(const BehaviorPolicy& policy, const std::string& phase) {
  BehaviorLog log;
  RunPhase(policy, phase, log);
  return log;
}

}  // namespace fyp::puppet
