#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/classifier/validation.h"
#include "fyp/common/error.h"
#include "fyp/common/http_server.h"
#include "fyp/platform/types.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "test_util.h"

namespace fyp::classifier {
namespace {

using fyp::testing::DefaultCorpus;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInfrastructure;
}

const platform::TopicProfile& Topic(const std::string& id) {
  return DefaultCorpus()->Topic(id);
}

TEST(RuleBasedTest, KeywordMatch) {
  RuleBasedClassifier rules;
  VideoMeta meta;
  meta.hashtags = {"#cooking"};
  EXPECT_TRUE(rules.Classify(meta, Topic("cooking")));
  EXPECT_FALSE(rules.Classify(meta, Topic("fitness")));
  meta = {};
  meta.signature = "Sports Betting tips daily";
  EXPECT_TRUE(rules.Classify(meta, Topic("sports_betting")));
  meta.signature = "cookingpot";
  EXPECT_FALSE(rules.Classify(meta, Topic("cooking")));
}

TEST(RuleBasedTest, EmptyMetaIsOffTopic) {
  RuleBasedClassifier rules;
  for (const auto& topic : DefaultCorpus()->topics()) {
    EXPECT_FALSE(rules.Classify(VideoMeta{}, topic));
  }
}

TEST(RuleBasedTest, PerfectOnGeneratedCorpus) {
  RuleBasedClassifier rules;
  const auto& corpus = *DefaultCorpus();
  for (const auto& topic : corpus.topics()) {
    std::vector<bool> predicted, gold;
    for (const auto& v : corpus.videos()) {
      predicted.push_back(rules.Classify(VideoMeta::FromCard(v.Card()), topic));
      gold.push_back(std::count(v.true_topics.begin(), v.true_topics.end(), topic.topic_id) > 0);
    }
    ValidationReport r = ConfusionMetrics(predicted, gold);
    EXPECT_EQ(r.recall, 1.0) << topic.topic_id;
    EXPECT_EQ(r.precision, 1.0) << topic.topic_id;
    // Determinism: a second pass agrees exactly.
    for (std::size_t i = 0; i < 200; ++i) {
      EXPECT_EQ(rules.Classify(VideoMeta::FromCard(corpus.videos()[i].Card()), topic),
                predicted[i]);
    }
  }
}

TEST(PromptTest, ContainsEveryFieldAndKeyword) {
  VideoMeta meta{"Grandma's lasagna, step by step", {"#lasagna", "#dinner"}, {"pasta", "oven"},
                 "chef_rosa", "Home cook from Naples"};
  for (const auto& topic : DefaultCorpus()->topics()) {
    std::string prompt = BuildPrompt(meta, topic);
    EXPECT_NE(prompt.find(meta.description), std::string::npos);
    EXPECT_NE(prompt.find(meta.nickname), std::string::npos);
    EXPECT_NE(prompt.find(meta.signature), std::string::npos);
    for (const auto& h : meta.hashtags) EXPECT_NE(prompt.find(h), std::string::npos);
    for (const auto& w : meta.suggested_words) EXPECT_NE(prompt.find(w), std::string::npos);
    for (const auto& k : topic.keywords) EXPECT_NE(prompt.find(k), std::string::npos);
    EXPECT_NE(prompt.find(topic.display_name), std::string::npos);
    EXPECT_NE(prompt.find("'Yes'"), std::string::npos);
  }
}

TEST(PromptTest, TemplateLayout) {
  VideoMeta meta{"d", {"h1", "h2"}, {"w"}, "n", "s"};
  std::string prompt = BuildPrompt(meta, Topic("fitness"));
  EXPECT_TRUE(prompt.starts_with(
      "You are a classifier tasked with determining whether the given content has anything to do "
      "with fitness, health, exercise."));
  EXPECT_TRUE(prompt.ends_with(
      "\n\nDescription: d, Hashtags: h1, h2, Suggested Words: w, Nickname: n, Signature: s"));
}

TEST(ParseYesNoTest, Answers) {
  EXPECT_TRUE(ParseYesNo("Yes"));
  EXPECT_TRUE(ParseYesNo("  yes."));
  EXPECT_TRUE(ParseYesNo("YES, it is about cooking"));
  EXPECT_FALSE(ParseYesNo("No"));
  EXPECT_FALSE(ParseYesNo("\nno!"));
  for (const char* bad : {"", "Yesterday", "Nope", "Maybe", "I think yes"}) {
    EXPECT_EQ(CodeOf([&] { ParseYesNo(bad); }), ErrorCode::kClassifier) << bad;
  }
}

// Chat-completions stand-in answering from a canned function.
class FakeLlm : public Transport {
 public:
  explicit FakeLlm(std::function<HttpResponse(const nlohmann::json&)> answer)
      : answer_(std::move(answer)) {}
  HttpResponse RoundTrip(const HttpRequest& request) override {
    std::lock_guard lock(mu_);
    requests.push_back(request);
    return answer_(nlohmann::json::parse(request.body));
  }
  static HttpResponse Reply(const std::string& content) {
    nlohmann::json j{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
    return {200, {{"Content-Type", "application/json"}}, j.dump()};
  }
  std::vector<HttpRequest> requests;

 private:
  std::mutex mu_;
  std::function<HttpResponse(const nlohmann::json&)> answer_;
};

class LlmTest : public ::testing::Test {
 protected:
  LlmOptions Options(int port) {
    LlmOptions o;
    o.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    o.max_requests_per_second = 1000;
    o.timeout_seconds = 5;
    o.api_key_env = "FYP_TEST_LLM_KEY";
    return o;
  }
};

TEST_F(LlmTest, SendsPromptAndParsesAnswer) {
  setenv("FYP_TEST_LLM_KEY", "sk-test", 1);
  FakeLlm fake([](const nlohmann::json& req) {
    std::string prompt = req.at("messages").at(0).at("content");
    return FakeLlm::Reply(prompt.find("lasagna") != std::string::npos ? "Yes" : "No.");
  });
  HttpServer server(fake, 2);
  int port = server.Start("127.0.0.1", 0);
  LlmClassifier llm(Options(port));
  EXPECT_TRUE(llm.Classify({"lasagna night", {}, {}, "", ""}, Topic("cooking")));
  EXPECT_FALSE(llm.Classify({"leg day", {}, {}, "", ""}, Topic("cooking")));
  server.Stop();
  ASSERT_EQ(fake.requests.size(), 2u);
  const auto& req = fake.requests[0];
  EXPECT_EQ(req.method, "POST");
  EXPECT_EQ(req.path, "/v1/chat/completions");
  EXPECT_EQ(FindHeader(req.headers, "Authorization"), std::optional<std::string>("Bearer sk-test"));
  auto body = nlohmann::json::parse(req.body);
  EXPECT_EQ(body.at("model"), "gpt-4o-mini");
  EXPECT_EQ(body.at("temperature"), 0);
  EXPECT_EQ(body.at("messages").at(0).at("content"),
            BuildPrompt({"lasagna night", {}, {}, "", ""}, Topic("cooking")));
  unsetenv("FYP_TEST_LLM_KEY");
}

TEST_F(LlmTest, FailuresAreClassifierErrors) {
  FakeLlm fake([](const nlohmann::json& req) -> HttpResponse {
    std::string d = req.at("messages").at(0).at("content");
    if (d.find("status") != std::string::npos) return {503, {}, "overloaded"};
    if (d.find("shape") != std::string::npos) return {200, {}, "{\"choices\":[]}"};
    return FakeLlm::Reply("Perhaps");
  });
  HttpServer server(fake, 2);
  int port = server.Start("127.0.0.1", 0);
  LlmClassifier llm(Options(port));
  for (const char* d : {"status", "shape", "words"}) {
    EXPECT_EQ(CodeOf([&] { llm.Classify({d, {}, {}, "", ""}, Topic("cooking")); }),
              ErrorCode::kClassifier)
        << d;
  }
  server.Stop();
  LlmClassifier unreachable(Options(port));
  EXPECT_EQ(CodeOf([&] { unreachable.Classify({}, Topic("cooking")); }), ErrorCode::kClassifier);
}

TEST_F(LlmTest, RateLimitSpacesRequests) {
  FakeLlm fake([](const nlohmann::json&) { return FakeLlm::Reply("No"); });
  HttpServer server(fake, 2);
  int port = server.Start("127.0.0.1", 0);
  LlmOptions o = Options(port);
  o.max_requests_per_second = 20;
  LlmClassifier llm(o);
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) llm.Classify({}, Topic("cooking"));
  auto elapsed = std::chrono::steady_clock::now() - start;
  server.Stop();
  EXPECT_GE(elapsed, std::chrono::milliseconds(190));
}

TEST(MakeClassifierTest, Backends) {
  EXPECT_EQ(MakeClassifier("rule_based", {})->name(), "rule_based");
  LlmOptions o;
  o.endpoint = "http://127.0.0.1:9/x";
  EXPECT_EQ(MakeClassifier("external_llm", o)->name(), "external_llm");
  EXPECT_EQ(CodeOf([] { MakeClassifier("external_llm", {}); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { MakeClassifier("oracle", {}); }), ErrorCode::kConfig);
}

TEST(KappaTest, KnownValue) {
  std::vector<std::vector<int>> counts = {{4, 0}, {3, 1}, {2, 2}, {0, 4},
                                          {1, 3}, {4, 0}, {0, 4}, {3, 1}};
  EXPECT_NEAR(FleissKappa(counts), 0.456209150326797, 1e-12);
}

TEST(KappaTest, UnanimousIsOne) {
  RatingMatrix m;
  m.rater_ids = {"a", "b", "c", "d"};
  for (int i = 0; i < 10; ++i) {
    m.item_ids.push_back("v" + std::to_string(i));
    m.labels.push_back(std::vector<bool>(4, i % 3 == 0));
  }
  EXPECT_EQ(FleissKappa(m), 1.0);
}

TEST(KappaTest, SingleCategoryIsDegenerate) {
  using Counts = std::vector<std::vector<int>>;
  EXPECT_EQ(CodeOf([] { FleissKappa(Counts{{3, 0}, {3, 0}}); }), ErrorCode::kDegenerate);
  EXPECT_THROW(FleissKappa(Counts{{3, 0}}), Error);
  EXPECT_THROW(FleissKappa(Counts{{3, 0}, {2, 0}}), Error);
}

TEST(KappaTest, RandomLabelsNearZeroAndBounded) {
  std::mt19937_64 rng(12);
  std::vector<std::vector<int>> counts;
  for (int i = 0; i < 10000; ++i) {
    int yes = 0;
    for (int r = 0; r < 4; ++r) yes += rng() & 1;
    counts.push_back({4 - yes, yes});
  }
  double k = FleissKappa(counts);
  EXPECT_LT(std::abs(k), 0.05);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<int>> small;
    for (int i = 0; i < 2 + static_cast<int>(rng() % 10); ++i) {
      int yes = static_cast<int>(rng() % 4);
      small.push_back({3 - yes, yes});
    }
    try {
      double v = FleissKappa(small);
      ASSERT_GE(v, -1.0);
      ASSERT_LE(v, 1.0);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kDegenerate);
    }
  }
}

TEST(MajorityVoteTest, StrictMajority) {
  RatingMatrix m;
  m.rater_ids = {"a", "b", "c", "d"};
  m.item_ids = {"1", "2", "3"};
  m.labels = {{true, true, true, false}, {true, true, false, false}, {false, false, false, true}};
  EXPECT_EQ(MajorityVote(m), (std::vector<Vote>{Vote::kYes, Vote::kTie, Vote::kNo}));
}

TEST(MetricsTest, HandComputed) {
  std::vector<bool> predicted, gold;
  auto add = [&](bool p, bool g, int n) {
    for (int i = 0; i < n; ++i) {
      predicted.push_back(p);
      gold.push_back(g);
    }
  };
  add(true, true, 3);
  add(true, false, 1);
  add(false, true, 1);
  add(false, false, 5);
  ValidationReport r = ConfusionMetrics(predicted, gold);
  EXPECT_EQ(r.tp, 3u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.tn, 5u);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.75);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(r.f1, 0.75);
}

TEST(MetricsTest, PerfectAndDegenerate) {
  ValidationReport r = ConfusionMetrics({true, false, true}, {true, false, true});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  r = ConfusionMetrics({false, false}, {false, false});
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_EQ(CodeOf([] { ConfusionMetrics({}, {}); }), ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { ConfusionMetrics({true}, {true, false}); }), ErrorCode::kConfig);
}

TEST(MetricsTest, IdentitiesHoldOnRandomData) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng() % 60;
    std::vector<bool> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng() & 1;
      g[i] = rng() & 1;
    }
    ValidationReport r = ConfusionMetrics(p, g);
    ASSERT_EQ(r.tp + r.fp + r.fn + r.tn, n);
    ASSERT_NEAR(r.accuracy, static_cast<double>(r.tp + r.tn) / n, 1e-12);
    double harmonic = r.precision + r.recall > 0
                          ? 2 * r.precision * r.recall / (r.precision + r.recall)
                          : 0.0;
    ASSERT_NEAR(r.f1, harmonic, 1e-12);
  }
}

TEST(MetricsTest, PublishedPrecisionRecall) {
  EXPECT_NEAR(F1Score(0.966, 0.791), 0.8697848605577689, 1e-12);
  EXPECT_NEAR(F1Score(0.966, 0.791), 0.87, 0.005);
  EXPECT_EQ(F1Score(0, 0), 0.0);
}

TEST(ValidationTest, ExcludesTies) {
  RatingMatrix m;
  m.rater_ids = {"a", "b"};
  m.item_ids = {"1", "2", "3", "4"};
  m.labels = {{true, true}, {false, false}, {true, false}, {true, true}};
  ValidationReport r = ValidateClassifier(m, {{"1", true}, {"2", true}, {"3", true}, {"4", true}});
  EXPECT_EQ(r.tie_count, 1u);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 1u);
  ASSERT_TRUE(r.fleiss_kappa.has_value());
  EXPECT_EQ(CodeOf([&] { ValidateClassifier(m, {{"1", true}}); }), ErrorCode::kConfig);
}

TEST(RatingsTest, ParseFormats) {
  RatingMatrix m = ParseRatings(
      "item_id,rater_id,label\n"
      "v1,alice,yes\nv1,bob,no\n"
      "v2\talice\t1\nv2\tbob\t1\n");
  EXPECT_EQ(m.items(), 2u);
  EXPECT_EQ(m.raters(), 2u);
  EXPECT_EQ(m.labels[0], (std::vector<bool>{true, false}));
  EXPECT_EQ(m.labels[1], (std::vector<bool>{true, true}));
  EXPECT_THROW(ParseRatings("v1,a,yes\nv1,a,no\n"), Error);
  EXPECT_THROW(ParseRatings("v1,a,yes\nv1,b,no\nv2,a,yes\n"), Error);
  EXPECT_THROW(ParseRatings("v1,a,maybe\n"), Error);
}

TEST(RatingsTest, LoadFromFile) {
  fyp::testing::TempDir dir;
  {
    std::ofstream out(dir.File("r.csv"));
    out << "v1,a,y\nv1,b,n\nv2,a,true\nv2,b,false\n";
  }
  EXPECT_EQ(LoadRatings(dir.File("r.csv")).items(), 2u);
  EXPECT_THROW(LoadRatings(dir.File("missing.csv")), Error);
}

}  // namespace
}  // namespace fyp::classifier
