// fypaudit: command-line entry point for the FYP audit testbed.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fyp/classifier/classifier.h"
#include "fyp/client/client.h"
#include "fyp/clone/clone.h"
#include "fyp/common/error.h"
#include "fyp/common/http_server.h"
#include "fyp/config/config.h"
#include "fyp/orchestrator/analysis.h"
#include "fyp/orchestrator/experiment.h"
#include "fyp/platform/service.h"
#include "fyp/proxy/recorder.h"
#include "fyp/proxy/signal_trace.h"
#include "fyp/wire/applog.h"
#include "nlohmann/json.hpp"

namespace {

using namespace fyp;

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfrastructure = 3;
constexpr int kExitDegenerate = 4;

void Log(const std::string& level, const std::string& command, const std::string& message) {
  nlohmann::ordered_json j{{"level", level}, {"cmd", command}, {"msg", message}};
  std::cerr << j.dump() << std::endl;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kNotFound: return kExitConfig;
    case ErrorCode::kDegenerate: return kExitDegenerate;
    default: return kExitInfrastructure;
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInfrastructure, "cannot write " + path);
  out << text;
}

config::Config LoadConfigOrDefault(const std::string& path) {
  return path.empty() ? config::Config{} : config::LoadConfig(path);
}

std::shared_ptr<const wire::Dictionary> LoadDictionary(const std::string& path) {
  if (path.empty()) return std::make_shared<wire::Dictionary>(wire::DefaultEventDictionary());
  return std::make_shared<wire::Dictionary>(wire::Dictionary::Load(path));
}

// Accepts a run.json ("accounts": {label: creds}), an array of credential
// objects, or an object keyed by anything whose values are credentials.
std::vector<wire::AccountCredentials> LoadCredentials(const std::string& path) {
  std::vector<wire::AccountCredentials> out;
  try {
    auto j = nlohmann::json::parse(ReadFile(path));
    if (j.is_object() && j.contains("accounts")) j = j.at("accounts");
    auto add = [&](const nlohmann::json& c) {
      out.push_back({c.at("account_id").get<std::string>(), c.at("device_id").get<std::string>(),
                     c.at("key_id").get<std::string>(), c.at("key").get<std::string>()});
    };
    if (j.is_array()) {
      for (const auto& c : j) add(c);
    } else {
      for (const auto& [_, c] : j.items()) add(c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "bad credentials file " + path + ": " + e.what());
  }
  return out;
}

const wire::AccountCredentials& FindCredentials(
    const std::vector<wire::AccountCredentials>& all, const std::string& account_id) {
  for (const auto& c : all) {
    if (c.account_id == account_id) return c;
  }
  throw Error(ErrorCode::kConfig, "no credentials for account " + account_id);
}

std::atomic<HttpServer*> g_server{nullptr};

void HandleSignal(int) {
  if (auto* s = g_server.load()) s->Stop();
}

void ServeUntilSignal(HttpServer& server, const std::string& listen, const std::string& command) {
  auto [host, port] = ParseHostPort(listen);
  int bound = server.Bind(host, port);
  Log("info", command, "listening on " + host + ":" + std::to_string(bound));
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  server.Run();
  g_server = nullptr;
  Log("info", command, "stopped");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sock-puppet audit testbed for a simulated short-video feed"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Experiment config file (JSON)");

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Generate a synthetic video corpus");
  std::string corpus_out, dictionary_out;
  std::size_t corpus_total = 0;
  std::uint64_t corpus_seed = 0;
  corpus_cmd->add_option("--out", corpus_out, "Corpus file (JSON Lines)")->required();
  corpus_cmd->add_option("--total", corpus_total, "Number of videos (default from config)");
  corpus_cmd->add_option("--seed", corpus_seed, "Corpus seed (default from config)");
  corpus_cmd->add_option("--dictionary-out", dictionary_out,
                         "Also write an app-log compression dictionary");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the platform over HTTP");
  std::string serve_listen = "127.0.0.1:8480", serve_corpus, serve_profile;
  std::uint64_t serve_seed = 0;
  int serve_threads = 8;
  serve_cmd->add_option("--listen", serve_listen, "host:port to bind");
  serve_cmd->add_option("--corpus", serve_corpus, "Corpus file; generated from config if absent");
  serve_cmd->add_option("--seed", serve_seed, "Platform seed (default from config)");
  serve_cmd->add_option("--profile", serve_profile, "Calibration profile override");
  serve_cmd->add_option("--threads", serve_threads, "Worker threads");

  // proxy
  auto* proxy_cmd = app.add_subcommand("proxy", "Run the recording proxy");
  std::string proxy_listen = "127.0.0.1:8481", proxy_upstream, proxy_trace_dir = "traces";
  proxy_cmd->add_option("--listen", proxy_listen, "host:port to bind");
  proxy_cmd->add_option("--upstream", proxy_upstream, "Platform host:port")->required();
  proxy_cmd->add_option("--trace-dir", proxy_trace_dir, "Directory for session traces");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run the three-phase experiment");
  std::string exp_results, exp_topic, exp_design = "three_phase", exp_profile;
  std::uint64_t exp_seed = 0;
  std::uint32_t exp_runs = 0, exp_phase_length = 0, exp_seed_count = 0;
  double exp_confidence = 0;
  exp_cmd->add_option("--results", exp_results, "Results directory (default from config)");
  exp_cmd->add_option("--topic", exp_topic, "Topic id");
  exp_cmd->add_option("--runs", exp_runs, "Number of runs (default 5)");
  exp_cmd->add_option("--seed", exp_seed, "Master seed");
  exp_cmd->add_option("--phase-length", exp_phase_length, "Videos per phase (default 200)");
  exp_cmd->add_option("--seed-count", exp_seed_count, "Seeding videos (default 25)");
  exp_cmd->add_option("--confidence", exp_confidence, "Confidence level (default 0.99)");
  exp_cmd->add_option("--profile", exp_profile, "Calibration profile override");
  exp_cmd->add_option("--design", exp_design, "three_phase or signal_comparison")
      ->check(CLI::IsMember({"three_phase", "signal_comparison"}));

  // clone
  auto* clone_cmd = app.add_subcommand("clone", "Rewrite a signal trace and replay it");
  std::string clone_trace, clone_platform, clone_credentials, clone_out, clone_dictionary;
  std::string clone_pacing = "none";
  double clone_scale = 1.0;
  std::vector<std::string> clone_targets;
  std::uint32_t clone_count = 0;
  clone_cmd->add_option("--trace", clone_trace, "Signal trace file")->required();
  clone_cmd->add_option("--platform", clone_platform, "Platform host:port")->required();
  clone_cmd->add_option("--credentials", clone_credentials,
                        "Credentials file holding the source (and any --target) accounts")
      ->required();
  clone_cmd->add_option("--target", clone_targets, "Existing fresh account(s) to clone into");
  clone_cmd->add_option("--count", clone_count, "Register this many fresh targets");
  clone_cmd->add_option("--out", clone_out, "Write the clone report (JSON) here");
  clone_cmd->add_option("--dictionary", clone_dictionary, "App-log dictionary file");
  clone_cmd->add_option("--pacing", clone_pacing, "none, recorded or scaled")
      ->check(CLI::IsMember({"none", "recorded", "scaled"}));
  clone_cmd->add_option("--scale", clone_scale, "Gap multiplier for scaled pacing");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check clones against original and baselines");
  std::string verify_platform, verify_original, verify_topic, verify_out;
  std::vector<std::string> verify_credentials, verify_clones, verify_baselines;
  std::uint32_t verify_fetch = 200;
  double verify_confidence = 0.99;
  std::uint64_t verify_cursor = 0;
  verify_cmd->add_option("--platform", verify_platform, "Platform host:port")->required();
  verify_cmd->add_option("--credentials", verify_credentials, "Credentials file(s)")->required();
  verify_cmd->add_option("--original", verify_original, "Original account id")->required();
  verify_cmd->add_option("--clones", verify_clones, "Clone account ids")->required();
  verify_cmd->add_option("--baselines", verify_baselines, "Baseline account ids")->required();
  verify_cmd->add_option("--topic", verify_topic, "Topic id")->required();
  verify_cmd->add_option("--fetch", verify_fetch, "Fetch-mode videos per account");
  verify_cmd->add_option("--confidence", verify_confidence, "Confidence level");
  verify_cmd->add_option("--cursor", verify_cursor, "Fetch cursor");
  verify_cmd->add_option("--out", verify_out, "Write the verdict (JSON) here");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute statistics over a results directory");
  std::string analyze_results, analyze_out;
  double analyze_confidence = 0.99;
  analyze_cmd->add_option("--results", analyze_results, "Results directory")->required();
  analyze_cmd->add_option("--confidence", analyze_confidence, "Confidence level");
  analyze_cmd->add_option("--out", analyze_out, "Output directory (default RESULTS/analysis)");

  // report
  auto* report_cmd = app.add_subcommand("report", "Print the tally of significant runs");
  std::string report_results, report_out;
  double report_confidence = 0.99;
  report_cmd->add_option("--results", report_results, "Results directory")->required();
  report_cmd->add_option("--confidence", report_confidence, "Confidence level");
  report_cmd->add_option("--out", report_out, "Also write the table (TSV) here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    config::Config cfg = LoadConfigOrDefault(config_path);

    if (*corpus_cmd) {
      if (corpus_total) cfg.corpus.total = corpus_total;
      if (corpus_seed) cfg.corpus.seed = corpus_seed;
      auto corpus = platform::GenerateCorpus(cfg.topics, cfg.corpus);
      corpus.Save(corpus_out);
      Log("info", command, "wrote " + std::to_string(corpus.size()) + " videos to " + corpus_out);
      if (!dictionary_out.empty()) {
        wire::BuildDictionary(wire::SampleEventRecords(4096, cfg.corpus.seed)).Save(dictionary_out);
        Log("info", command, "wrote dictionary to " + dictionary_out);
      }
      return kExitOk;
    }

    if (*serve_cmd) {
      auto corpus = std::make_shared<platform::Corpus>(
          serve_corpus.empty() ? platform::GenerateCorpus(cfg.topics, cfg.corpus)
                               : platform::Corpus::Load(serve_corpus));
      platform::PlatformOptions options;
      options.seed = serve_seed ? serve_seed : cfg.seed;
      options.calibration =
          serve_profile.empty() ? cfg.calibration : platform::CalibrationProfile(serve_profile);
      options.dictionary = LoadDictionary(cfg.dictionary_path);
      platform::PlatformService service(corpus, options);
      HttpServer server(service, serve_threads);
      ServeUntilSignal(server, serve_listen, command);
      return kExitOk;
    }

    if (*proxy_cmd) {
      HttpTransport upstream(proxy_upstream);
      proxy::RecorderOptions options;
      options.trace_dir = proxy_trace_dir;
      proxy::RecordingTransport recorder(upstream, options);
      HttpServer server(recorder);
      ServeUntilSignal(server, proxy_listen, command);
      return kExitOk;
    }

    if (*exp_cmd) {
      if (!exp_results.empty()) cfg.results_dir = exp_results;
      if (!exp_topic.empty()) cfg.plan.topic = exp_topic;
      if (exp_runs) cfg.plan.runs = exp_runs;
      if (exp_seed) cfg.seed = exp_seed;
      if (exp_phase_length) cfg.plan.phase_length = exp_phase_length;
      if (exp_seed_count) cfg.plan.seed_count = exp_seed_count;
      if (exp_confidence > 0) cfg.plan.confidence = exp_confidence;
      if (!exp_profile.empty()) cfg.calibration = platform::CalibrationProfile(exp_profile);
      cfg.Validate();
      orchestrator::Orchestrator orch(cfg);
      Log("info", command, "running " + std::to_string(cfg.plan.runs) + " " + exp_design +
                               " run(s) on topic " + cfg.plan.topic);
      auto result = exp_design == "three_phase" ? orch.RunExperiment() : orch.RunSignalComparison();
      orchestrator::WriteExperimentSummary(cfg.results_dir, result, cfg);
      int failed = 0;
      for (const auto& r : result.runs) {
        if (!r.ok) {
          ++failed;
          Log("error", command, "run " + std::to_string(r.run) + " failed: " + r.error);
        }
      }
      Log("info", command, std::to_string(result.runs.size() - failed) + "/" +
                               std::to_string(result.runs.size()) + " runs complete in " +
                               cfg.results_dir);
      return failed ? kExitInfrastructure : kExitOk;
    }

    if (*clone_cmd) {
      auto dictionary = LoadDictionary(clone_dictionary.empty() ? cfg.dictionary_path
                                                                : clone_dictionary);
      auto trace = proxy::LoadSignalTrace(clone_trace);
      auto creds = LoadCredentials(clone_credentials);
      if (trace.exchanges.empty()) throw Error(ErrorCode::kConfig, "trace is empty");
      const auto& source = FindCredentials(creds, trace.account_id);
      HttpTransport platform(clone_platform);
      std::vector<wire::AccountCredentials> targets;
      for (const auto& id : clone_targets) targets.push_back(FindCredentials(creds, id));
      for (std::uint32_t i = 0; i < clone_count; ++i) targets.push_back(client::Register(platform));
      if (targets.empty()) throw Error(ErrorCode::kConfig, "give --target or --count");
      clone::ReplayOptions replay;
      replay.pacing = clone_pacing == "none"       ? clone::Pacing::kNone
                      : clone_pacing == "recorded" ? clone::Pacing::kRecorded
                                                   : clone::Pacing::kScaled;
      replay.scale = clone_scale;
      nlohmann::ordered_json report = nlohmann::ordered_json::array();
      for (const auto& target : targets) {
        clone::IdentityRewrite rw{source.account_id, source.device_id,
                                  {source.key_id, source.key}, target};
        auto rewritten = clone::RewriteTrace(trace, rw, *dictionary);
        auto r = clone::Replay(rewritten, platform, replay);
        auto view = client::FetchAccountView(platform, target.account_id);
        report.push_back({{"account_id", target.account_id},
                          {"device_id", target.device_id},
                          {"key_id", target.key_id},
                          {"key", target.key},
                          {"sent", r.sent},
                          {"accepted", r.accepted},
                          {"last_nonce", clone::MaxNonce(rewritten, *dictionary)},
                          {"affinity", view.affinity_text}});
        Log("info", command, "cloned " + source.account_id + " into " + target.account_id);
      }
      std::string text = report.dump(2) + "\n";
      if (!clone_out.empty()) WriteFile(clone_out, text);
      std::cout << text;
      return kExitOk;
    }

    if (*verify_cmd) {
      std::vector<wire::AccountCredentials> creds;
      for (const auto& path : verify_credentials) {
        auto more = LoadCredentials(path);
        creds.insert(creds.end(), more.begin(), more.end());
      }
      std::vector<wire::AccountCredentials> clones, baselines;
      for (const auto& id : verify_clones) clones.push_back(FindCredentials(creds, id));
      for (const auto& id : verify_baselines) baselines.push_back(FindCredentials(creds, id));
      HttpTransport platform(verify_platform);
      auto classifier = classifier::MakeClassifier(cfg.classifier_backend, cfg.llm);
      clone::VerifyOptions options;
      options.fetch_count = verify_fetch;
      options.confidence = verify_confidence;
      options.cursor = verify_cursor;
      auto verdict = clone::VerifyClones(platform, FindCredentials(creds, verify_original), clones,
                                         baselines, config::FindTopic(cfg, verify_topic),
                                         *classifier, options);
      std::string text = verdict.ToJson() + "\n";
      if (!verify_out.empty()) WriteFile(verify_out, text);
      std::cout << text;
      Log("info", command, verdict.pass ? "verdict: pass" : "verdict: fail");
      return verdict.pass ? kExitOk : kExitVerdictFailed;
    }

    if (*analyze_cmd) {
      auto runs = orchestrator::LoadResults(analyze_results);
      auto analysis = orchestrator::Analyze(runs, analyze_confidence);
      std::string out = analyze_out.empty()
                            ? (std::filesystem::path(analyze_results) / "analysis").string()
                            : analyze_out;
      orchestrator::WriteAnalysis(analysis, out);
      Log("info", command, "wrote analysis of " + std::to_string(runs.size()) + " run(s) to " + out);
      return kExitOk;
    }

    if (*report_cmd) {
      auto runs = orchestrator::LoadResults(report_results);
      auto analysis = orchestrator::Analyze(runs, report_confidence);
      std::string tsv = analysis.tally.ToTsv();
      if (!report_out.empty()) WriteFile(report_out, tsv);
      std::cout << tsv;
      return kExitOk;
    }
  } catch (const Error& e) {
    Log("error", command, e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    Log("error", command, e.what());
    return kExitInfrastructure;
  }
  return kExitConfig;
}
