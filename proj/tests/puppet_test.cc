#include <map>
#include <set>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/client/client.h"
#include "fyp/common/error.h"
#include "fyp/platform/service.h"
#include "fyp/proxy/recorder.h"
#include "fyp/puppet/agent.h"
#include "fyp/stats/stats.h"
#include "fyp/wire/endpoints.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fyp::puppet {
namespace {

using fyp::testing::DefaultCorpus;

constexpr Role kAllRoles[] = {Role::kWatchTopic,     Role::kBaselineSkip,  Role::kGivesImplicit,
                              Role::kGivesExplicit,  Role::kCeasesImplicit, Role::kCeasesExplicit};

TEST(DecideActionTest, Table) {
  const std::map<Role, std::pair<Action, Action>> table = {
      {Role::kWatchTopic, {Action::kWatchFull, Action::kSkip}},
      {Role::kBaselineSkip, {Action::kSkip, Action::kSkip}},
      {Role::kGivesImplicit, {Action::kSkip, Action::kSkip}},
      {Role::kGivesExplicit, {Action::kNotInterestedAfterWatch, Action::kSkip}},
      {Role::kCeasesImplicit, {Action::kWatchFull, Action::kSkip}},
      {Role::kCeasesExplicit, {Action::kWatchFull, Action::kSkip}},
  };
  for (Role role : kAllRoles) {
    EXPECT_EQ(DecideAction(role, true), table.at(role).first) << RoleName(role);
    EXPECT_EQ(DecideAction(role, false), table.at(role).second) << RoleName(role);
    // Pure: repeated calls agree.
    for (int i = 0; i < 10; ++i) EXPECT_EQ(DecideAction(role, true), table.at(role).first);
  }
}

TEST(RoleTest, NamesRoundTrip) {
  std::set<std::string> names;
  for (Role role : kAllRoles) {
    EXPECT_EQ(ParseRole(RoleName(role)), role);
    names.insert(RoleName(role));
  }
  EXPECT_EQ(names.size(), 6u);
  EXPECT_THROW(ParseRole("lurker"), Error);
  EXPECT_STREQ(ActionName(Action::kNotInterestedAfterWatch), "not_interested_after_watch");
}

TEST(PolicyTest, Validate) {
  BehaviorPolicy p{Role::kWatchTopic, "cooking", 200, 25};
  EXPECT_NO_THROW(p.Validate());
  p.phase_length = 0;
  EXPECT_THROW(p.Validate(), Error);
  p = {Role::kWatchTopic, "", 200, 25};
  EXPECT_THROW(p.Validate(), Error);
}

TEST(BehaviorLogTest, JsonlRoundTrip) {
  fyp::testing::TempDir dir;
  BehaviorLog log{"u1", "gives_explicit", "cooking", "phase2", {}, {"w1"}};
  log.entries.push_back({1, "7001", true, Action::kNotInterestedAfterWatch, 15000});
  log.entries.push_back({2, "7002", false, Action::kSkip, 350});
  EXPECT_EQ(log.OnTopic(), (std::vector<bool>{true, false}));
  EXPECT_EQ(log.OnTopicCount(), 1u);
  std::string text = log.ToJsonl();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  BehaviorLog back = BehaviorLog::FromJsonl(text);
  EXPECT_EQ(back.ToJsonl(), text);
  EXPECT_EQ(back.entries, log.entries);
  EXPECT_EQ(back.warnings, log.warnings);
  log.Save(dir.File("nested/log.jsonl"));
  EXPECT_EQ(BehaviorLog::Load(dir.File("nested/log.jsonl")).ToJsonl(), text);
  EXPECT_THROW(BehaviorLog::FromJsonl("{bad"), Error);
}

class AgentTest : public ::testing::Test {
 protected:
  AgentTest()
      : platform_(DefaultCorpus(), platform::PlatformOptions{}),
        recorder_(platform_, proxy::RecorderOptions{}) {}

  Agent MakeAgent(const wire::AccountCredentials& creds, std::uint64_t seed = 1,
                  const std::string& topic = "cooking") {
    AgentOptions options;
    options.seed = seed;
    return Agent(recorder_, creds, nullptr, rules_, DefaultCorpus()->Topic(topic), options);
  }

  platform::PlatformService platform_;
  proxy::RecordingTransport recorder_;
  classifier::RuleBasedClassifier rules_;
};

TEST_F(AgentTest, BaselineStaysNearBasePrevalence) {
  int inside = 0;
  for (int i = 0; i < 5; ++i) {
    auto creds = client::Register(recorder_);
    Agent agent = MakeAgent(creds, i);
    BehaviorLog log = agent.RunPhase({Role::kBaselineSkip, "cooking", 200, 25}, "phase1");
    ASSERT_EQ(log.entries.size(), 200u);
    auto ci = stats::AgrestiCoull(log.OnTopicCount(), 200, 0.99);
    inside += (ci.lo <= 0.085 && 0.085 <= ci.hi) ? 1 : 0;
    for (const auto& e : log.entries) {
      ASSERT_EQ(e.action, Action::kSkip);
      ASSERT_GE(e.dwell_ms, 200);
      ASSERT_LE(e.dwell_ms, 2000);
    }
  }
  EXPECT_EQ(inside, 5);
}

TEST_F(AgentTest, WatchTopicAfterSeedingClimbs) {
  auto creds = client::Register(recorder_);
  Agent agent = MakeAgent(creds);
  BehaviorLog seed = agent.SeedAccount(25);
  EXPECT_EQ(seed.entries.size(), 25u);
  EXPECT_TRUE(seed.warnings.empty());
  BehaviorLog log = agent.RunPhase({Role::kWatchTopic, "cooking", 200, 25}, "phase1");
  ASSERT_EQ(log.entries.size(), 200u);
  auto curve = stats::CumulativeCurve(log.OnTopic());
  for (std::size_t i = 1; i < curve.size(); ++i) ASSERT_GE(curve[i], curve[i - 1]);
  EXPECT_GE(curve.back(), 70u);
  for (std::size_t i = 0; i < log.entries.size(); ++i) EXPECT_EQ(log.entries[i].index, i + 1);
}

TEST_F(AgentTest, WatchReportsCarryFullDuration) {
  auto creds = client::Register(recorder_);
  Agent agent = MakeAgent(creds);
  BehaviorLog log = agent.RunPhase({Role::kGivesExplicit, "cooking", 120, 25}, "phase2");
  std::map<std::string, LogEntry> by_video;
  for (const auto& e : log.entries) by_video[e.video_id] = e;
  std::size_t stats_reports = 0, not_interested = 0;
  for (const auto& x : recorder_.Exchanges(creds.device_id)) {
    std::string path = PathWithoutQuery(x.path);
    if (path == wire::kStatsPath) {
      auto body = wire::DecodeStats(x.request_body);
      const LogEntry& e = by_video.at(body.report.video_id);
      const auto& corpus = *DefaultCorpus();
      std::int64_t duration = corpus.videos()[*corpus.IndexOf(e.video_id)].duration_ms;
      if (e.action == Action::kSkip) {
        EXPECT_FALSE(body.report.finished);
        EXPECT_EQ(body.report.watch_duration_ms, e.dwell_ms);
      } else {
        EXPECT_TRUE(body.report.finished);
        EXPECT_EQ(body.report.watch_duration_ms, duration);
        EXPECT_EQ(e.dwell_ms, duration);
      }
      ++stats_reports;
    } else if (path == wire::kFeedbackPath) {
      auto body = wire::DecodeFeedback(x.request_body);
      if (body.action == wire::FeedbackAction::kNotInterested) {
        EXPECT_TRUE(by_video.at(body.video_id).on_topic);
        ++not_interested;
      }
    }
  }
  EXPECT_EQ(stats_reports, 120u);
  EXPECT_EQ(not_interested, log.OnTopicCount());
  auto state = platform_.Snapshot(creds.account_id);
  EXPECT_EQ(state.last_nonce, agent.client().last_nonce());
}

TEST_F(AgentTest, SameSeedSameLog) {
  platform::PlatformService a(DefaultCorpus(), {}), b(DefaultCorpus(), {});
  std::vector<std::string> logs;
  for (auto* p : {&a, &b}) {
    auto creds = client::Register(*p);
    AgentOptions options;
    options.seed = 99;
    Agent agent(*p, creds, nullptr, rules_, DefaultCorpus()->Topic("fitness"), options);
    agent.SeedAccount(25);
    logs.push_back(agent.RunPhase({Role::kWatchTopic, "fitness", 100, 25}, "phase1").ToJsonl());
  }
  EXPECT_EQ(logs[0], logs[1]);
}

TEST_F(AgentTest, ShortSearchWarns) {
  auto creds = client::Register(recorder_);
  platform::TopicProfile rare{"rare", "rare", 0.01, {"zzqx-nothing-matches"}};
  AgentOptions options;
  Agent agent(recorder_, creds, nullptr, rules_, rare, options);
  BehaviorLog seed = agent.SeedAccount(25);
  EXPECT_TRUE(seed.entries.empty());
  ASSERT_EQ(seed.warnings.size(), 1u);
}

// Fails every request after the first `budget` ones.
class FlakyTransport : public Transport {
 public:
  FlakyTransport(Transport& inner, int budget) : inner_(inner), budget_(budget) {}
  HttpResponse RoundTrip(const HttpRequest& request) override {
    if (budget_-- <= 0) return {503, {}, "down"};
    return inner_.RoundTrip(request);
  }

 private:
  Transport& inner_;
  int budget_;
};

TEST_F(AgentTest, ErrorsKeepPartialLog) {
  auto creds = client::Register(platform_);
  FlakyTransport flaky(platform_, 100);
  AgentOptions options;
  Agent agent(flaky, creds, nullptr, rules_, DefaultCorpus()->Topic("cooking"), options);
  BehaviorLog log;
  EXPECT_THROW(agent.RunPhase({Role::kBaselineSkip, "cooking", 200, 25}, "phase1", log), Error);
  EXPECT_GT(log.entries.size(), 10u);
  EXPECT_LT(log.entries.size(), 200u);
  EXPECT_EQ(log.account_id, creds.account_id);
}

}  // namespace
}  // namespace fyp::puppet
