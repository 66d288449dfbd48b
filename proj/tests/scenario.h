#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fyp/classifier/classifier.h"
#include "fyp/client/client.h"
#include "fyp/clone/clone.h"
#include "fyp/platform/service.h"
#include "fyp/proxy/recorder.h"
#include "fyp/proxy/signal_trace.h"
#include "fyp/puppet/agent.h"
#include "fyp/wire/applog.h"

namespace fyp::testing {

// One platform with a personalized original, its clones and skip-only
// baselines, all driven through a recording proxy.
struct CloneScenario {
  std::unique_ptr<platform::PlatformService> platform;
  std::unique_ptr<proxy::RecordingTransport> recorder;
  wire::AccountCredentials original;
  proxy::SignalTrace original_trace;
  std::vector<wire::AccountCredentials> clones;
  std::vector<wire::AccountCredentials> baselines;
};

inline puppet::AgentOptions AgentSeed(std::uint64_t seed, const std::string& label) {
  puppet::AgentOptions options;
  options.seed = DeriveSeed(seed, label);
  return options;
}

inline CloneScenario BuildCloneScenario(std::shared_ptr<const platform::Corpus> corpus,
                                        std::uint64_t seed, const std::string& topic_id,
                                        int clone_count, int baseline_count,
                                        platform::Calibration calibration = {}) {
  CloneScenario s;
  platform::PlatformOptions options;
  options.seed = seed;
  options.calibration = calibration;
  s.platform = std::make_unique<platform::PlatformService>(corpus, options);
  s.recorder = std::make_unique<proxy::RecordingTransport>(*s.platform, proxy::RecorderOptions{});
  classifier::RuleBasedClassifier rules;
  const platform::TopicProfile& topic = corpus->Topic(topic_id);

  s.original = client::Register(*s.recorder);
  {
    puppet::Agent agent(*s.recorder, s.original, nullptr, rules, topic,
                        AgentSeed(seed, "original"));
    agent.SeedAccount(25);
    agent.RunPhase({puppet::Role::kWatchTopic, topic_id, 200, 25}, "phase1");
  }
  for (int i = 0; i < baseline_count; ++i) {
    auto creds = client::Register(*s.recorder);
    puppet::Agent agent(*s.recorder, creds, nullptr, rules, topic,
                        AgentSeed(seed, "baseline-" + std::to_string(i)));
    agent.RunPhase({puppet::Role::kBaselineSkip, topic_id, 200, 25}, "phase1");
    s.baselines.push_back(creds);
  }
  s.original_trace = proxy::ExtractTrace(s.recorder->Exchanges(s.original.device_id),
                                         s.original.account_id);
  for (int i = 0; i < clone_count; ++i) {
    auto target = client::Register(*s.platform);
    clone::IdentityRewrite rw{s.original.account_id, s.original.device_id,
                              {s.original.key_id, s.original.key}, target};
    auto rewritten = clone::RewriteTrace(s.original_trace, rw, wire::DefaultEventDictionary());
    clone::Replay(rewritten, *s.platform);
    s.clones.push_back(target);
  }
  return s;
}

}  // namespace fyp::testing
