#include <chrono>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/client/client.h"
#include "fyp/clone/clone.h"
#include "fyp/common/error.h"
#include "fyp/platform/service.h"
#include "fyp/proxy/signal_trace.h"
#include "fyp/stats/stats.h"
#include "fyp/wire/applog.h"
#include "fyp/wire/endpoints.h"
#include "fyp/wire/signing.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "scenario.h"
#include "test_util.h"

namespace fyp::clone {
namespace {

using fyp::testing::BuildCloneScenario;
using fyp::testing::CloneScenario;
using fyp::testing::DefaultCorpus;

const wire::Dictionary& Dict() { return wire::DefaultEventDictionary(); }

IdentityRewrite RewriteFor(const wire::AccountCredentials& source,
                           const wire::AccountCredentials& target) {
  return {source.account_id, source.device_id, {source.key_id, source.key}, target};
}

// Every byte an exchange carries, with app-log payloads decompressed.
std::string Surface(const proxy::RecordedExchange& e) {
  std::string out = e.method + "\n" + e.path + "\n";
  for (const auto& [k, v] : e.request_headers) out += k + ":" + v + "\n";
  out += e.request_body;
  if (PathWithoutQuery(e.path) == wire::kAppLogPath) {
    out += wire::DecompressPayload(e.request_body, Dict());
  }
  return out;
}

class CloneTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scenario_ = new CloneScenario(BuildCloneScenario(DefaultCorpus(), 11, "cooking", 0, 1));
  }
  static void TearDownTestSuite() {
    delete scenario_;
    scenario_ = nullptr;
  }
  static CloneScenario* scenario_;
};

CloneScenario* CloneTest::scenario_ = nullptr;

TEST_F(CloneTest, SelfRewriteIsSemanticallyIdentical) {
  const auto& s = *scenario_;
  auto same = RewriteTrace(s.original_trace, RewriteFor(s.original, s.original), Dict());
  ASSERT_EQ(same.exchanges.size(), s.original_trace.exchanges.size());
  for (std::size_t i = 0; i < same.exchanges.size(); ++i) {
    const auto& a = s.original_trace.exchanges[i];
    const auto& b = same.exchanges[i];
    EXPECT_EQ(a.sequence_no, b.sequence_no);
    EXPECT_EQ(a.path, b.path);
    std::string path = PathWithoutQuery(a.path);
    if (path == wire::kAppLogPath) {
      EXPECT_EQ(wire::DecodeAppLogPayload(a.request_body, Dict()),
                wire::DecodeAppLogPayload(b.request_body, Dict()));
    } else {
      EXPECT_EQ(a.request_body, b.request_body);
    }
  }
}

TEST_F(CloneTest, RewrittenTraceVerifiesUnderTargetKey) {
  const auto& s = *scenario_;
  auto target = client::Register(*s.platform);
  auto rewritten = RewriteTrace(s.original_trace, RewriteFor(s.original, target), Dict());
  EXPECT_EQ(rewritten.account_id, target.account_id);
  EXPECT_EQ(rewritten.device_id, target.device_id);
  auto lookup = [&](std::string_view id) -> std::optional<std::string> {
    if (id == target.key_id) return target.key;
    return std::nullopt;
  };
  for (const auto& e : rewritten.exchanges) {
    ASSERT_TRUE(wire::VerifyRequest(e.Request(), lookup).accepted()) << e.sequence_no;
  }
}

TEST_F(CloneTest, NonIdentityFieldsPreserved) {
  const auto& s = *scenario_;
  auto target = client::Register(*s.platform);
  auto rewritten = RewriteTrace(s.original_trace, RewriteFor(s.original, target), Dict());
  for (std::size_t i = 0; i < rewritten.exchanges.size(); ++i) {
    const auto& a = s.original_trace.exchanges[i];
    const auto& b = rewritten.exchanges[i];
    std::string path = PathWithoutQuery(a.path);
    if (path == wire::kFeedPath) {
      auto x = wire::DecodeFeedRequest(a.request_body);
      auto y = wire::DecodeFeedRequest(b.request_body);
      EXPECT_EQ(x.watch_reports, y.watch_reports);
      EXPECT_EQ(x.session_nonce, y.session_nonce);
      EXPECT_EQ(x.count, y.count);
      EXPECT_EQ(y.account_id, target.account_id);
    } else if (path == wire::kStatsPath) {
      EXPECT_EQ(wire::DecodeStats(a.request_body).report, wire::DecodeStats(b.request_body).report);
    } else if (path == wire::kFeedbackPath) {
      EXPECT_EQ(wire::DecodeFeedback(a.request_body).action,
                wire::DecodeFeedback(b.request_body).action);
    } else if (path == wire::kAppLogPath) {
      auto x = wire::DecodeAppLogPayload(a.request_body, Dict());
      auto y = wire::DecodeAppLogPayload(b.request_body, Dict());
      ASSERT_EQ(x.events.size(), y.events.size());
      for (std::size_t k = 0; k < x.events.size(); ++k) {
        EXPECT_EQ(x.events[k].video_id, y.events[k].video_id);
        EXPECT_EQ(x.events[k].dwell_ms, y.events[k].dwell_ms);
        EXPECT_EQ(y.events[k].account_id, target.account_id);
      }
    }
  }
}

TEST_F(CloneTest, NoSourceIdentitySurvives) {
  const auto& s = *scenario_;
  auto target = client::Register(*s.platform);
  auto rewritten = RewriteTrace(s.original_trace, RewriteFor(s.original, target), Dict());
  for (const auto& e : rewritten.exchanges) {
    std::string surface = Surface(e);
    ASSERT_EQ(surface.find(s.original.account_id), std::string::npos) << e.sequence_no;
    ASSERT_EQ(surface.find(s.original.device_id), std::string::npos) << e.sequence_no;
    ASSERT_EQ(surface.find(s.original.key_id), std::string::npos) << e.sequence_no;
  }
}

TEST_F(CloneTest, UnverifiableSourceRejected) {
  const auto& s = *scenario_;
  auto tampered = s.original_trace;
  tampered.exchanges[3].request_body[0] ^= 1;
  auto target = client::Register(*s.platform);
  try {
    RewriteTrace(tampered, RewriteFor(s.original, target), Dict());
    FAIL() << "expected integrity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
  }
  IdentityRewrite wrong_key = RewriteFor(s.original, target);
  wrong_key.source_key.secret = "not-the-key";
  EXPECT_THROW(RewriteTrace(s.original_trace, wrong_key, Dict()), Error);
}

TEST_F(CloneTest, EmptyTraceLeavesTargetUnchanged) {
  const auto& s = *scenario_;
  auto target = client::Register(*s.platform);
  auto before = platform::SerializeState(s.platform->Snapshot(target.account_id));
  proxy::SignalTrace empty{s.original.account_id, s.original.device_id, {}};
  auto rewritten = RewriteTrace(empty, RewriteFor(s.original, target), Dict());
  ReplayReport report = Replay(rewritten, *s.platform);
  EXPECT_EQ(report.sent, 0u);
  EXPECT_EQ(platform::SerializeState(s.platform->Snapshot(target.account_id)), before);
  EXPECT_EQ(MaxNonce(rewritten, Dict()), 0u);
}

TEST_F(CloneTest, ReplayReproducesAffinity) {
  const auto& s = *scenario_;
  std::vector<std::string> affinities;
  for (int i = 0; i < 2; ++i) {
    auto target = client::Register(*s.platform);
    auto rewritten = RewriteTrace(s.original_trace, RewriteFor(s.original, target), Dict());
    ReplayReport report = Replay(rewritten, *s.platform);
    EXPECT_EQ(report.sent, rewritten.exchanges.size());
    EXPECT_EQ(report.accepted, report.sent);
    auto state = s.platform->Snapshot(target.account_id);
    EXPECT_EQ(state.last_nonce, MaxNonce(rewritten, Dict()));
    affinities.push_back(platform::SerializeAffinity(state));
  }
  EXPECT_EQ(affinities[0], affinities[1]);
  // The original also received search-origin seeding watches; both end at the cap.
  EXPECT_EQ(affinities[0], platform::SerializeAffinity(s.platform->Snapshot(s.original.account_id)));
}

TEST_F(CloneTest, SecondReplayRejectedAtFirstExchange) {
  const auto& s = *scenario_;
  auto target = client::Register(*s.platform);
  auto rewritten = RewriteTrace(s.original_trace, RewriteFor(s.original, target), Dict());
  Replay(rewritten, *s.platform);
  try {
    Replay(rewritten, *s.platform);
    FAIL() << "expected a replay error";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
    EXPECT_EQ(e.sequence_no(), rewritten.exchanges.front().sequence_no);
  }
}

TEST_F(CloneTest, ReplayingUnrewrittenTraceIntoOtherAccountFails) {
  const auto& s = *scenario_;
  // The source account already consumed these nonces.
  EXPECT_THROW(Replay(s.original_trace, *s.platform), ReplayError);
}

TEST_F(CloneTest, PacingFollowsRecordedGaps) {
  const auto& s = *scenario_;
  auto target = client::Register(*s.platform);
  auto rewritten = RewriteTrace(s.original_trace, RewriteFor(s.original, target), Dict());
  rewritten.exchanges.resize(6);
  std::int64_t span = rewritten.exchanges.back().timestamp_ms -
                      rewritten.exchanges.front().timestamp_ms;
  ASSERT_GT(span, 0);
  double scale = 50.0 / static_cast<double>(span);
  auto start = std::chrono::steady_clock::now();
  Replay(rewritten, *s.platform, {Pacing::kScaled, scale});
  auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  EXPECT_GE(elapsed.count(), 45.0);
}

TEST_F(CloneTest, VerifyOriginalAgainstItself) {
  const auto& s = *scenario_;
  classifier::RuleBasedClassifier rules;
  const auto& topic = DefaultCorpus()->Topic("cooking");
  CloneVerdict v = VerifyClones(*s.platform, s.original, {s.original}, s.baselines, topic, rules);
  ASSERT_EQ(v.accounts.size(), 3u);
  EXPECT_EQ(v.accounts[0].interval, v.accounts[1].interval);
  EXPECT_EQ(v.accounts[0].on_topic, v.accounts[1].on_topic);
  EXPECT_TRUE(v.pass);
  EXPECT_TRUE(v.state_unchanged);
  EXPECT_EQ(v.accounts[0].role, "original");
  EXPECT_EQ(v.accounts[2].role, "baseline");
  auto json = nlohmann::json::parse(v.ToJson());
  EXPECT_EQ(json.at("pass"), true);
  EXPECT_EQ(json.at("accounts").size(), 3u);
}

TEST_F(CloneTest, IntervalsMatchCounts) {
  const auto& s = *scenario_;
  classifier::RuleBasedClassifier rules;
  const auto& topic = DefaultCorpus()->Topic("cooking");
  CloneVerdict v = VerifyClones(*s.platform, s.original, {s.baselines[0]}, s.baselines, topic,
                                rules, {200, 0.99, 4});
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.failing.empty());
  for (const auto& m : v.accounts) {
    EXPECT_EQ(m.fetched, 200u);
    EXPECT_EQ(m.interval, stats::AgrestiCoull(m.on_topic, 200, 0.99));
    EXPECT_EQ(m.digest_before, m.digest_after);
  }
}

TEST(CloneSoundnessTest, TrueClonesPassAndFakesFail) {
  classifier::RuleBasedClassifier rules;
  const auto& topic = DefaultCorpus()->Topic("cooking");
  int true_pass = 0, fake_fail = 0, unchanged = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    CloneScenario s = BuildCloneScenario(DefaultCorpus(), 1000 + t, "cooking", 1, 2);
    VerifyOptions options;
    options.cursor = static_cast<std::uint64_t>(t);
    CloneVerdict real = VerifyClones(*s.platform, s.original, s.clones, {s.baselines[0]}, topic,
                                     rules, options);
    CloneVerdict fake = VerifyClones(*s.platform, s.original, {s.baselines[1]}, {s.baselines[0]},
                                     topic, rules, options);
    true_pass += real.pass ? 1 : 0;
    fake_fail += fake.pass ? 0 : 1;
    unchanged += (real.state_unchanged && fake.state_unchanged) ? 1 : 0;
  }
  EXPECT_GE(true_pass, 99);
  EXPECT_GE(fake_fail, 99);
  EXPECT_EQ(unchanged, trials);
}

}  // namespace
}  // namespace fyp::clone
