#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "fyp/classifier/classifier.h"
#include "fyp/client/client.h"
#include "fyp/common/http.h"
#include "fyp/common/http_server.h"
#include "fyp/platform/service.h"
#include "fyp/proxy/recorder.h"
#include "fyp/proxy/trace.h"
#include "fyp/puppet/agent.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fyp {
namespace {

using fyp::testing::DefaultCorpus;

// Platform served over loopback HTTP, and a recording proxy in front of it
// also served over HTTP.
class LoopbackTest : public ::testing::Test {
 protected:
  LoopbackTest()
      : remote_(DefaultCorpus(), platform::PlatformOptions{}),
        local_(DefaultCorpus(), platform::PlatformOptions{}),
        platform_server_(remote_, 4) {
    int port = platform_server_.Start("127.0.0.1", 0);
    upstream_ = std::make_unique<HttpTransport>("127.0.0.1:" + std::to_string(port));
    proxy::RecorderOptions options;
    options.trace_dir = traces_.path();
    recorder_ = std::make_unique<proxy::RecordingTransport>(*upstream_, options);
    proxy_server_ = std::make_unique<HttpServer>(*recorder_, 4);
    int proxy_port = proxy_server_->Start("127.0.0.1", 0);
    via_proxy_ = std::make_unique<HttpTransport>("127.0.0.1:" + std::to_string(proxy_port));
  }

  ~LoopbackTest() override {
    // Close client connections first so Stop does not wait on keep-alives.
    via_proxy_.reset();
    proxy_server_->Stop();
    upstream_.reset();
    platform_server_.Stop();
  }

  puppet::BehaviorLog Scroll(Transport& t, puppet::Role role, std::uint32_t length) {
    auto creds = client::Register(t);
    puppet::AgentOptions options;
    options.seed = 77;
    puppet::Agent agent(t, creds, nullptr, rules_, DefaultCorpus()->Topic("cooking"), options);
    agent.SeedAccount(10);
    return agent.RunPhase({role, "cooking", length, 10}, "phase1");
  }

  fyp::testing::TempDir traces_;
  platform::PlatformService remote_;
  platform::PlatformService local_;
  HttpServer platform_server_;
  std::unique_ptr<HttpTransport> upstream_;
  std::unique_ptr<proxy::RecordingTransport> recorder_;
  std::unique_ptr<HttpServer> proxy_server_;
  std::unique_ptr<HttpTransport> via_proxy_;
  classifier::RuleBasedClassifier rules_;
};

TEST_F(LoopbackTest, ProxyIsTransparent) {
  auto proxied = Scroll(*via_proxy_, puppet::Role::kWatchTopic, 60);
  auto direct = Scroll(local_, puppet::Role::kWatchTopic, 60);
  EXPECT_EQ(proxied.entries, direct.entries);
  EXPECT_EQ(platform::StateDigest(remote_.Snapshot(proxied.account_id)),
            platform::StateDigest(local_.Snapshot(direct.account_id)));
}

TEST_F(LoopbackTest, ProxyRecordsEveryExchangeToDisk) {
  auto log = Scroll(*via_proxy_, puppet::Role::kBaselineSkip, 40);
  std::size_t on_disk = 0;
  for (const auto& entry : std::filesystem::directory_iterator(traces_.path())) {
    if (entry.path().extension() != ".fltrace") continue;
    auto exchanges = proxy::ReadTrace(entry.path().string());
    auto index = proxy::ReadIndex(entry.path().string() + ".idx");
    ASSERT_EQ(exchanges.size(), index.size());
    on_disk += exchanges.size();
  }
  std::size_t in_memory = 0;
  for (const auto& session : recorder_->Sessions()) {
    in_memory += recorder_->Exchanges(session).size();
  }
  EXPECT_EQ(on_disk, in_memory);
  EXPECT_GE(on_disk, 40u / 8u);
}

TEST_F(LoopbackTest, ErrorsCrossTheProxyUnchanged) {
  HttpRequest request;
  request.method = "GET";
  request.path = "/no/such/endpoint";
  auto direct = upstream_->RoundTrip(request);
  auto proxied = via_proxy_->RoundTrip(request);
  EXPECT_EQ(direct.status, 404);
  EXPECT_EQ(proxied.status, direct.status);
  EXPECT_EQ(proxied.body, direct.body);
}

#ifdef FYPAUDIT_PATH

int RunCli(const std::string& args) {
  std::string cmd = std::string(FYPAUDIT_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  fyp::testing::TempDir dir;
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("no-such-command"), 2);
  EXPECT_EQ(RunCli("analyze --results " + dir.File("missing")), 2);
  EXPECT_EQ(RunCli("analyze --results " + dir.path().string()), 4);
  EXPECT_EQ(RunCli("--config " + dir.File("missing.json") + " analyze --results " + dir.path().string()),
            2);
}

TEST(CliTest, ExperimentThenAnalyze) {
  fyp::testing::TempDir dir;
  std::string results = dir.File("results");
  ASSERT_EQ(RunCli("experiment --results " + results +
                   " --runs 1 --phase-length 20 --seed-count 5 --seed 3"),
            0);
  EXPECT_TRUE(std::filesystem::exists(results + "/run-01/run.json"));
  EXPECT_TRUE(std::filesystem::exists(results + "/summary.tsv"));
  auto before = fyp::testing::SnapshotTree(results);
  ASSERT_EQ(RunCli("analyze --results " + results + " --out " + dir.File("analysis")), 0);
  EXPECT_TRUE(std::filesystem::exists(dir.File("analysis") + "/tally.tsv"));
  EXPECT_EQ(fyp::testing::SnapshotTree(results), before);
  EXPECT_EQ(RunCli("report --results " + results), 0);
}

#endif

}  // namespace
}  // namespace fyp
