#include "fyp/orchestrator/experiment.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "fyp/client/client.h"
#include "fyp/orchestrator/analysis.h"
#include "fyp/common/error.h"
#include "fyp/common/seed.h"
#include "fyp/platform/service.h"
#include "fyp/proxy/recorder.h"
#include "fyp/proxy/signal_trace.h"
#include "fyp/wire/applog.h"
#include "fyp/wire/signing.h"
#include "nlohmann/json.hpp"

namespace fyp::orchestrator {
namespace fs = std::filesystem;
using puppet::Role;

namespace {

constexpr std::int64_t kDayMs = 24LL * 3600 * 1000;

std::string RunDirName(std::uint32_t run) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "run-%02u", run);
  return buf;
}

void WriteFile(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInfrastructure, "cannot write " + path.string());
  out << content;
}

// Runs the tasks on one thread each and rethrows the first failure (in task
// order) once all have finished.
void RunConcurrently(const std::vector<std::function<void()>>& tasks) {
  std::vector<std::exception_ptr> errors(tasks.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    threads.emplace_back([&, i] {
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string SessionFor(const wire::AccountCredentials& creds) {
  HttpRequest probe;
  probe.headers.emplace_back(wire::kDeviceHeader, creds.device_id);
  return proxy::SessionKey(probe);
}

nlohmann::ordered_json VerdictJson(const stats::TestVerdict& v) {
  return {{"z", v.z},
          {"significant", v.significant},
          {"direction", v.direction},
          {"mode", stats::TestModeName(v.mode)},
          {"confidence", v.confidence},
          {"critical", v.critical},
          {"p_value", v.p_value}};
}

}  // namespace

Comparison Compare(std::string name, stats::ProportionSample a, stats::ProportionSample b,
                   double confidence, stats::TestMode mode) {
  Comparison c{std::move(name), a, b, std::nullopt, ""};
  try {
    c.verdict = stats::TwoProportionZTest(a, b, confidence, mode);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
    c.note = "degenerate";
  }
  return c;
}

struct Orchestrator::RunContext {
  std::uint32_t run = 0;
  std::uint64_t seed = 0;
  fs::path dir;
  std::unique_ptr<Transport> upstream;
  std::unique_ptr<proxy::RecordingTransport> recorder;
  std::unique_ptr<classifier::Classifier> classifier;
  platform::TopicProfile topic;
  std::map<std::string, wire::AccountCredentials> creds;
  std::map<std::string, std::unique_ptr<puppet::Agent>> agents;
};

Orchestrator::Orchestrator(config::Config config) : config_(std::move(config)) {
  config_.Validate();
  if (config_.dictionary_path.empty()) {
    dictionary_ = std::make_shared<wire::Dictionary>(wire::DefaultEventDictionary());
  } else {
    dictionary_ = std::make_shared<wire::Dictionary>(wire::Dictionary::Load(config_.dictionary_path));
  }
  if (config_.platform_address.empty()) {
    corpus_ = std::make_shared<platform::Corpus>(
        platform::GenerateCorpus(config_.topics, config_.corpus));
  }
}

std::unique_ptr<Transport> Orchestrator::MakeUpstream(std::uint64_t run_seed) {
  if (!config_.platform_address.empty()) {
    return std::make_unique<HttpTransport>(config_.platform_address);
  }
  platform::PlatformOptions options;
  options.seed = run_seed;
  options.calibration = config_.calibration;
  options.dictionary = dictionary_;
  return std::make_unique<platform::PlatformService>(corpus_, options);
}

ExperimentResult Orchestrator::RunExperiment() {
  ExperimentResult result;
  for (std::uint32_t run = 1; run <= config_.plan.runs; ++run) {
    result.runs.push_back(RunOne(run, "three_phase"));
  }
  return result;
}

ExperimentResult Orchestrator::RunSignalComparison() {
  ExperimentResult result;
  for (std::uint32_t run = 1; run <= config_.plan.runs; ++run) {
    result.runs.push_back(RunOne(run, "signal_comparison"));
  }
  return result;
}

RunResult Orchestrator::RunOne(std::uint32_t run, const std::string& design) {
  RunResult result;
  result.run = run;
  result.design = design;
  result.seed = config_.plan.RunSeed(config_.seed, run - 1);
  result.directory = RunDirName(run);

  RunContext ctx;
  ctx.run = run;
  ctx.seed = result.seed;
  ctx.dir = fs::path(config_.results_dir) / result.directory;
  fs::remove_all(ctx.dir);
  fs::create_directories(ctx.dir);
  try {
    ctx.upstream = MakeUpstream(ctx.seed);
    proxy::RecorderOptions recorder_options;
    recorder_options.trace_dir = (ctx.dir / "traces").string();
    // Unsigned requests (account creation) carry no timestamp header.
    recorder_options.clock = [] { return puppet::AgentOptions{}.clock_start_ms; };
    ctx.recorder = std::make_unique<proxy::RecordingTransport>(*ctx.upstream, recorder_options);
    ctx.classifier = classifier::MakeClassifier(config_.classifier_backend, config_.llm);
    ctx.topic = config::FindTopic(config_, config_.plan.topic);
    if (design == "three_phase") {
      RunThreePhase(ctx, result);
    } else {
      RunComparison(ctx, result);
    }
    result.comparisons = RunComparisons(design, result.logs, config_.plan.confidence);
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }

  nlohmann::ordered_json j;
  j["run"] = run;
  j["seed"] = result.seed;
  j["design"] = design;
  j["topic"] = config_.plan.topic;
  j["ok"] = result.ok;
  j["error"] = result.error;
  nlohmann::ordered_json accounts = nlohmann::ordered_json::object();
  for (const auto& [label, c] : ctx.creds) {
    accounts[label] = {{"account_id", c.account_id},
                       {"device_id", c.device_id},
                       {"key_id", c.key_id},
                       {"key", c.key}};
  }
  j["accounts"] = accounts;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [key, log] : result.logs) {
    counts[key] = {{"on_topic", log.OnTopicCount()}, {"videos", log.entries.size()}};
  }
  j["on_topic_counts"] = counts;
  j["replay_state_equal"] = result.replay_state_equal;
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const auto& c : result.comparisons) {
    nlohmann::ordered_json cj{{"name", c.name},
                              {"x1", c.a.x},
                              {"n1", c.a.n},
                              {"x2", c.b.x},
                              {"n2", c.b.n}};
    if (c.verdict) {
      cj["verdict"] = VerdictJson(*c.verdict);
    } else {
      cj["verdict"] = nullptr;
      cj["note"] = c.note;
    }
    comps.push_back(cj);
  }
  j["comparisons"] = comps;
  WriteFile(ctx.dir / "run.json", j.dump(2) + "\n");
  return result;
}

namespace {

struct PhaseTask {
  std::string label;    // account label
  std::string log_key;  // log name within the phase
  Role role;
};

struct DriverInputs {
  std::uint64_t seed;
  fs::path dir;
  const config::ExperimentPlan& plan;
  Transport& upstream;
  proxy::RecordingTransport& recorder;
  classifier::Classifier& classifier;
  const platform::TopicProfile& topic;
  std::shared_ptr<const wire::Dictionary> dictionary;
  std::map<std::string, wire::AccountCredentials>& creds;
  std::map<std::string, std::unique_ptr<puppet::Agent>>& agents;
  RunResult& result;
};

// Per-run helper shared by both designs.
class RunDriver {
 public:
  explicit RunDriver(DriverInputs inputs) : v_(std::move(inputs)) {}

  void NewAccount(const std::string& label) {
    auto creds = client::Register(v_.recorder);
    puppet::AgentOptions options;
    options.seed = DeriveSeed(v_.seed, label);
    options.page_size = v_.plan.page_size;
    options.skip_dwell_min_ms = v_.plan.skip_dwell_min_ms;
    options.skip_dwell_max_ms = v_.plan.skip_dwell_max_ms;
    v_.creds[label] = creds;
    v_.agents[label] = std::make_unique<puppet::Agent>(v_.recorder, creds, v_.dictionary,
                                                       v_.classifier, v_.topic, options);
  }

  puppet::Agent& agent(const std::string& label) { return *v_.agents.at(label); }
  const wire::AccountCredentials& creds(const std::string& label) { return v_.creds.at(label); }

  std::string LogPath(const std::string& phase, const std::string& key) {
    return (v_.dir / "logs" / (phase + "_" + key + ".jsonl")).string();
  }

  void Keep(const std::string& phase, const std::string& key, puppet::BehaviorLog log) {
    log.Save(LogPath(phase, key));
    v_.result.logs[phase + "/" + key] = std::move(log);
  }

  // Scrolls every task's account concurrently for one phase. The agents'
  // logical clocks are moved to the phase's start day first.
  void RunPhase(const std::string& phase, const std::vector<PhaseTask>& tasks, int day) {
    fs::create_directories(v_.dir / "logs");
    const std::int64_t start = puppet::AgentOptions{}.clock_start_ms + day * kDayMs;
    std::vector<puppet::BehaviorLog> logs(tasks.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      jobs.push_back([&, i] {
        auto& a = agent(tasks[i].label);
        if (a.clock().Now() < start) a.clock().Advance(start - a.clock().Now());
        puppet::BehaviorPolicy policy{tasks[i].role, v_.topic.topic_id, v_.plan.phase_length,
                                      v_.plan.seed_count};
        a.RunPhase(policy, phase, logs[i]);
      });
    }
    std::exception_ptr failure;
    try {
      RunConcurrently(jobs);
    } catch (...) {
      failure = std::current_exception();
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) Keep(phase, tasks[i].log_key, std::move(logs[i]));
    if (failure) std::rethrow_exception(failure);
  }

  // Seeds and scrolls the watch_topic account while the baseline scrolls.
  void Phase1() {
    NewAccount(kWatchTopic);
    NewAccount(kBaseline);
    Keep("phase1", "watch_topic_seed", agent(kWatchTopic).SeedAccount(v_.plan.seed_count));
    RunPhase("phase1", {{kWatchTopic, kWatchTopic, Role::kWatchTopic},
                        {kBaseline, kBaseline, Role::kBaselineSkip}},
             0);
    fs::create_directories(v_.dir / "signal");
    for (const char* label : {kWatchTopic, kBaseline}) {
      const auto& c = creds(label);
      traces_[label] = proxy::ExtractTrace(v_.recorder.Exchanges(SessionFor(c)), c.account_id);
      proxy::SaveSignalTrace((v_.dir / "signal" / (std::string(label) + ".fltrace")).string(),
                             traces_[label]);
    }
  }

  // Creates `target` and replays the source's FYP signal trace into it.
  void CloneInto(const std::string& source, const std::string& target) {
    NewAccount(target);
    const auto& src = creds(source);
    const auto& dst = creds(target);
    clone::IdentityRewrite rewrite{src.account_id, src.device_id, {src.key_id, src.key}, dst};
    auto rewritten = clone::RewriteTrace(traces_.at(source), rewrite, *v_.dictionary);
    clone::Replay(rewritten, v_.recorder);
    agent(target).client().set_last_nonce(clone::MaxNonce(rewritten, *v_.dictionary));
    auto source_view = client::FetchAccountView(v_.upstream, src.account_id);
    auto target_view = client::FetchAccountView(v_.upstream, dst.account_id);
    v_.result.replay_state_equal[target] = source_view.affinity_text == target_view.affinity_text;
  }

  void VerifyClones(const std::vector<std::string>& clones,
                    const std::vector<std::string>& baselines) {
    std::vector<wire::AccountCredentials> c, b;
    for (const auto& l : clones) c.push_back(creds(l));
    for (const auto& l : baselines) b.push_back(creds(l));
    clone::VerifyOptions options;
    options.fetch_count = v_.plan.verify_fetch;
    options.confidence = v_.plan.confidence;
    auto verdict = clone::VerifyClones(v_.upstream, creds(kWatchTopic), c, b, v_.topic,
                                       v_.classifier, options);
    WriteFile(v_.dir / "clone_verdict.json", verdict.ToJson() + "\n");
    v_.result.verdict = verdict;
    if (!verdict.pass) {
      throw Error(ErrorCode::kIntegrity, "clone verification pre-check failed");
    }
  }

  const puppet::BehaviorLog& Log(const std::string& key) { return v_.result.logs.at(key); }

 private:
  DriverInputs v_;
  std::map<std::string, proxy::SignalTrace> traces_;
};

}  // namespace

void Orchestrator::RunThreePhase(RunContext& ctx, RunResult& result) {
  RunDriver d({ctx.seed, ctx.dir, config_.plan, *ctx.upstream, *ctx.recorder, *ctx.classifier,
               ctx.topic, dictionary_, ctx.creds, ctx.agents, result});
  d.Phase1();

  for (const char* label : {kImplicit1, kImplicit2, kExplicit1, kExplicit2}) {
    d.CloneInto(kWatchTopic, label);
  }
  d.CloneInto(kBaseline, kClonedBaseline);
  d.NewAccount(kNonClonedBaseline);
  d.VerifyClones({kImplicit1, kImplicit2, kExplicit1, kExplicit2},
                 {kBaseline, kClonedBaseline, kNonClonedBaseline});

  d.RunPhase("phase2", {{kImplicit1, kImplicit1, Role::kGivesImplicit},
                        {kImplicit2, kImplicit2, Role::kGivesImplicit},
                        {kExplicit1, kExplicit1, Role::kGivesExplicit},
                        {kExplicit2, kExplicit2, Role::kGivesExplicit},
                        {kClonedBaseline, kClonedBaseline, Role::kBaselineSkip},
                        {kNonClonedBaseline, kNonClonedBaseline, Role::kBaselineSkip}},
             10);
  d.RunPhase("phase3", {{kImplicit1, "ceases_implicit", Role::kCeasesImplicit},
                        {kImplicit2, "continues_implicit", Role::kGivesImplicit},
                        {kExplicit1, "ceases_explicit", Role::kCeasesExplicit},
                        {kExplicit2, "continues_explicit", Role::kGivesExplicit},
                        {kClonedBaseline, kClonedBaseline, Role::kBaselineSkip},
                        {kNonClonedBaseline, kNonClonedBaseline, Role::kBaselineSkip}},
             11);
}

void Orchestrator::RunComparison(RunContext& ctx, RunResult& result) {
  RunDriver d({ctx.seed, ctx.dir, config_.plan, *ctx.upstream, *ctx.recorder, *ctx.classifier,
               ctx.topic, dictionary_, ctx.creds, ctx.agents, result});
  d.Phase1();
  for (const char* label : {kWatch1, kWatch2, kImplicit1, kImplicit2, kExplicit1, kExplicit2}) {
    d.CloneInto(kWatchTopic, label);
  }
  d.CloneInto(kBaseline, kClonedBaseline);
  d.NewAccount(kNonClonedBaseline);
  d.VerifyClones({kWatch1, kWatch2, kImplicit1, kImplicit2, kExplicit1, kExplicit2},
                 {kBaseline, kClonedBaseline, kNonClonedBaseline});
  d.RunPhase("phase2", {{kWatch1, kWatch1, Role::kWatchTopic},
                        {kWatch2, kWatch2, Role::kWatchTopic},
                        {kImplicit1, kImplicit1, Role::kGivesImplicit},
                        {kImplicit2, kImplicit2, Role::kGivesImplicit},
                        {kExplicit1, kExplicit1, Role::kGivesExplicit},
                        {kExplicit2, kExplicit2, Role::kGivesExplicit},
                        {kClonedBaseline, kClonedBaseline, Role::kBaselineSkip},
                        {kNonClonedBaseline, kNonClonedBaseline, Role::kBaselineSkip}},
             10);
}

void WriteExperimentSummary(const std::string& results_dir, const ExperimentResult& result,
                            const config::Config& config) {
  config::Config copy = config;
  copy.results_dir.clear();
  WriteFile(fs::path(results_dir) / "plan.json", config::ConfigToJson(copy));
  std::string tsv = "run\tdirectory\tdesign\tseed\tok\terror\n";
  for (const auto& r : result.runs) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), '\t', ' ');
    std::replace(error.begin(), error.end(), '\n', ' ');
    tsv += std::to_string(r.run) + "\t" + r.directory + "\t" + r.design + "\t" +
           std::to_string(r.seed) + "\t" + (r.ok ? "yes" : "no") + "\t" + error + "\n";
  }
  WriteFile(fs::path(results_dir) / "summary.tsv", tsv);
}

}  // namespace fyp::orchestrator
