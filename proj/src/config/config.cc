#include "fyp/config/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "fyp/common/error.h"
#include "fyp/common/seed.h"
#include "nlohmann/json.hpp"

namespace fyp::config {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::kConfig, "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

platform::PageSampling ParseSampling(const std::string& s) {
  if (s == "systematic") return platform::PageSampling::kSystematic;
  if (s == "iid") return platform::PageSampling::kIid;
  throw Error(ErrorCode::kConfig, "unknown page sampling '" + s + "'");
}

}  // namespace

void ExperimentPlan::Validate() const {
  if (topic.empty()) throw Error(ErrorCode::kConfig, "plan.topic is empty");
  if (runs < 1 || phase_length < 1 || verify_fetch < 1 || page_size < 1) {
    throw Error(ErrorCode::kConfig, "plan counts must be at least 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kConfig, "plan.confidence must lie in (0, 1)");
  }
  if (skip_dwell_min_ms < 0 || skip_dwell_max_ms < skip_dwell_min_ms) {
    throw Error(ErrorCode::kConfig, "plan skip dwell bounds are inverted");
  }
  if (!run_seeds.empty() && run_seeds.size() != runs) {
    throw Error(ErrorCode::kConfig, "plan.run_seeds must have one seed per run");
  }
}

std::uint64_t ExperimentPlan::RunSeed(std::uint64_t master_seed, std::uint32_t run) const {
  if (!run_seeds.empty()) return run_seeds.at(run);
  return DeriveSeed(master_seed, {HashLabel("run"), run});
}

void Config::Validate() const {
  platform::ValidateProfiles(topics);
  if (corpus.total == 0) throw Error(ErrorCode::kConfig, "corpus.total must be positive");
  calibration.Validate();
  plan.Validate();
  FindTopic(*this, plan.topic);
  if (classifier_backend != "rule_based" && classifier_backend != "external_llm") {
    throw Error(ErrorCode::kConfig, "unknown classifier backend '" + classifier_backend + "'");
  }
}

const platform::TopicProfile& FindTopic(const Config& config, const std::string& topic_id) {
  for (const auto& t : config.topics) {
    if (t.topic_id == topic_id) return t;
  }
  throw Error(ErrorCode::kConfig, "unknown topic '" + topic_id + "'");
}

Config ParseConfig(const std::string& json_text) {
  Config c;
  try {
    json j = json::parse(json_text);
    CheckKeys(j, {"seed", "corpus", "topics", "calibration", "platform_address", "dictionary",
                  "results_dir", "plan", "classifier"},
              "config");
    Read(j, "seed", c.seed);
    Read(j, "platform_address", c.platform_address);
    Read(j, "dictionary", c.dictionary_path);
    Read(j, "results_dir", c.results_dir);
    if (j.contains("corpus")) {
      const auto& k = j.at("corpus");
      CheckKeys(k, {"total", "seed", "multi_topic_rate"}, "corpus");
      Read(k, "total", c.corpus.total);
      Read(k, "seed", c.corpus.seed);
      Read(k, "multi_topic_rate", c.corpus.multi_topic_rate);
    }
    if (j.contains("topics")) {
      c.topics.clear();
      for (const auto& t : j.at("topics")) {
        CheckKeys(t, {"topic_id", "display_name", "base_prevalence", "keywords"}, "topics[]");
        platform::TopicProfile p;
        p.topic_id = t.at("topic_id").get<std::string>();
        p.display_name = t.value("display_name", p.topic_id);
        p.base_prevalence = t.at("base_prevalence").get<double>();
        p.keywords = t.at("keywords").get<std::vector<std::string>>();
        c.topics.push_back(std::move(p));
      }
    }
    if (j.contains("calibration")) {
      const auto& k = j.at("calibration");
      CheckKeys(k, {"profile", "w_watch_full", "w_watch_partial", "w_skip", "w_not_interested",
                    "score_floor", "score_cap", "gain", "p_cap", "p_floor_ratio",
                    "negative_decay", "skip_threshold_ms", "sampling"},
                "calibration");
      c.calibration = platform::CalibrationProfile(k.value("profile", std::string("default")));
      auto& cal = c.calibration;
      Read(k, "w_watch_full", cal.w_watch_full);
      Read(k, "w_watch_partial", cal.w_watch_partial);
      Read(k, "w_skip", cal.w_skip);
      Read(k, "w_not_interested", cal.w_not_interested);
      Read(k, "score_floor", cal.score_floor);
      Read(k, "score_cap", cal.score_cap);
      Read(k, "gain", cal.gain);
      Read(k, "p_cap", cal.p_cap);
      Read(k, "p_floor_ratio", cal.p_floor_ratio);
      Read(k, "negative_decay", cal.negative_decay);
      Read(k, "skip_threshold_ms", cal.skip_threshold_ms);
      if (k.contains("sampling")) cal.sampling = ParseSampling(k.at("sampling").get<std::string>());
    }
    if (j.contains("plan")) {
      const auto& k = j.at("plan");
      CheckKeys(k, {"topic", "runs", "phase_length", "seed_count", "confidence", "run_seeds",
                    "verify_fetch", "page_size", "skip_dwell_min_ms", "skip_dwell_max_ms"},
                "plan");
      auto& p = c.plan;
      Read(k, "topic", p.topic);
      Read(k, "runs", p.runs);
      Read(k, "phase_length", p.phase_length);
      Read(k, "seed_count", p.seed_count);
      Read(k, "confidence", p.confidence);
      Read(k, "run_seeds", p.run_seeds);
      Read(k, "verify_fetch", p.verify_fetch);
      Read(k, "page_size", p.page_size);
      Read(k, "skip_dwell_min_ms", p.skip_dwell_min_ms);
      Read(k, "skip_dwell_max_ms", p.skip_dwell_max_ms);
    }
    if (j.contains("classifier")) {
      const auto& k = j.at("classifier");
      CheckKeys(k, {"backend", "endpoint", "model", "api_key_env", "max_requests_per_second",
                    "timeout_seconds"},
                "classifier");
      Read(k, "backend", c.classifier_backend);
      Read(k, "endpoint", c.llm.endpoint);
      Read(k, "model", c.llm.model);
      Read(k, "api_key_env", c.llm.api_key_env);
      Read(k, "max_requests_per_second", c.llm.max_requests_per_second);
      Read(k, "timeout_seconds", c.llm.timeout_seconds);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid config: ") + e.what());
  }
  c.Validate();
  return c;
}

Config LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string ConfigToJson(const Config& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["corpus"] = {{"total", c.corpus.total},
                 {"seed", c.corpus.seed},
                 {"multi_topic_rate", c.corpus.multi_topic_rate}};
  auto topics = nlohmann::ordered_json::array();
  for (const auto& t : c.topics) {
    topics.push_back({{"topic_id", t.topic_id},
                      {"display_name", t.display_name},
                      {"base_prevalence", t.base_prevalence},
                      {"keywords", t.keywords}});
  }
  j["topics"] = topics;
  const auto& cal = c.calibration;
  j["calibration"] = {
      {"profile", cal.profile_id},
      {"w_watch_full", cal.w_watch_full},
      {"w_watch_partial", cal.w_watch_partial},
      {"w_skip", cal.w_skip},
      {"w_not_interested", cal.w_not_interested},
      {"score_floor", cal.score_floor},
      {"score_cap", cal.score_cap},
      {"gain", cal.gain},
      {"p_cap", cal.p_cap},
      {"p_floor_ratio", cal.p_floor_ratio},
      {"negative_decay", cal.negative_decay},
      {"skip_threshold_ms", cal.skip_threshold_ms},
      {"sampling", cal.sampling == platform::PageSampling::kSystematic ? "systematic" : "iid"}};
  j["platform_address"] = c.platform_address;
  j["dictionary"] = c.dictionary_path;
  j["results_dir"] = c.results_dir;
  const auto& p = c.plan;
  j["plan"] = {{"topic", p.topic},
               {"runs", p.runs},
               {"phase_length", p.phase_length},
               {"seed_count", p.seed_count},
               {"confidence", p.confidence},
               {"run_seeds", p.run_seeds},
               {"verify_fetch", p.verify_fetch},
               {"page_size", p.page_size},
               {"skip_dwell_min_ms", p.skip_dwell_min_ms},
               {"skip_dwell_max_ms", p.skip_dwell_max_ms}};
  j["classifier"] = {{"backend", c.classifier_backend},
                     {"endpoint", c.llm.endpoint},
                     {"model", c.llm.model},
                     {"api_key_env", c.llm.api_key_env},
                     {"max_requests_per_second", c.llm.max_requests_per_second},
                     {"timeout_seconds", c.llm.timeout_seconds}};
  return j.dump(2) + "\n";
}

}  // namespace fyp::config
