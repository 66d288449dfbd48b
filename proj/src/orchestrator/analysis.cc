#include "fyp/orchestrator/analysis.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fyp/common/error.h"
#include "nlohmann/json.hpp"

namespace fyp::orchestrator {
namespace fs = std::filesystem;
using stats::TestMode;

namespace {

stats::ProportionSample Sample(const std::map<std::string, puppet::BehaviorLog>& logs,
                               const std::string& key) {
  const auto& log = logs.at(key);
  return {log.OnTopicCount(), log.entries.size()};
}

stats::ProportionSample Pooled(const std::map<std::string, puppet::BehaviorLog>& logs,
                               const std::string& a, const std::string& b) {
  auto sa = Sample(logs, a);
  auto sb = Sample(logs, b);
  return {sa.x + sb.x, sa.n + sb.n};
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInfrastructure, "cannot write " + path.string());
  out << text;
}

// Phase 3 logs continue the Phase 2 accounts under new names.
const std::map<std::string, std::string>& Phase3Successor() {
  static const std::map<std::string, std::string> kMap = {
      {"gives_implicit_1", "ceases_implicit"},   {"gives_implicit_2", "continues_implicit"},
      {"gives_explicit_1", "ceases_explicit"},   {"gives_explicit_2", "continues_explicit"},
      {"cloned_baseline", "cloned_baseline"},    {"non_cloned_baseline", "non_cloned_baseline"}};
  return kMap;
}

}  // namespace

std::vector<Comparison> RunComparisons(const std::string& design,
                                       const std::map<std::string, puppet::BehaviorLog>& logs,
                                       double confidence) {
  std::vector<Comparison> out;
  auto add = [&](std::string name, stats::ProportionSample a, stats::ProportionSample b,
                 TestMode mode) { out.push_back(Compare(std::move(name), a, b, confidence, mode)); };
  if (logs.contains("phase1/watch_topic") && logs.contains("phase1/baseline")) {
    add("phase1_watch_vs_baseline", Sample(logs, "phase1/watch_topic"),
        Sample(logs, "phase1/baseline"), TestMode::kTwoSided);
  }
  if (design == "three_phase") {
    const auto implicit = Pooled(logs, "phase2/gives_implicit_1", "phase2/gives_implicit_2");
    const auto explicit_ = Pooled(logs, "phase2/gives_explicit_1", "phase2/gives_explicit_2");
    const auto cloned = Sample(logs, "phase2/cloned_baseline");
    const auto fresh = Sample(logs, "phase2/non_cloned_baseline");
    add("phase2_implicit_vs_explicit", implicit, explicit_, TestMode::kTwoSided);
    add("phase2_implicit_vs_cloned_baseline", implicit, cloned, TestMode::kTwoSided);
    add("phase2_explicit_vs_cloned_baseline", explicit_, cloned, TestMode::kTwoSided);
    add("phase2_implicit_vs_non_cloned_baseline", implicit, fresh, TestMode::kTwoSided);
    add("phase2_explicit_vs_non_cloned_baseline", explicit_, fresh, TestMode::kTwoSided);
    add("phase3_relapse_implicit", Sample(logs, "phase3/ceases_implicit"),
        Sample(logs, "phase3/continues_implicit"), TestMode::kOneSidedGreater);
    add("phase3_relapse_explicit", Sample(logs, "phase3/ceases_explicit"),
        Sample(logs, "phase3/continues_explicit"), TestMode::kOneSidedGreater);
  } else if (design == "signal_comparison") {
    const auto watch = Pooled(logs, "phase2/watch_1", "phase2/watch_2");
    const auto implicit = Pooled(logs, "phase2/gives_implicit_1", "phase2/gives_implicit_2");
    const auto explicit_ = Pooled(logs, "phase2/gives_explicit_1", "phase2/gives_explicit_2");
    add("watch_vs_implicit", watch, implicit, TestMode::kTwoSided);
    add("watch_vs_explicit", watch, explicit_, TestMode::kTwoSided);
    add("implicit_vs_explicit", implicit, explicit_, TestMode::kTwoSided);
    add("explicit_vs_cloned_baseline", explicit_, Sample(logs, "phase2/cloned_baseline"),
        TestMode::kTwoSided);
  } else {
    throw Error(ErrorCode::kConfig, "unknown design '" + design + "'");
  }
  return out;
}

std::vector<LoadedRun> LoadResults(const std::string& results_dir) {
  if (!fs::is_directory(results_dir)) {
    throw Error(ErrorCode::kConfig, "results directory " + results_dir + " does not exist");
  }
  std::vector<fs::path> run_dirs;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "run.json")) {
      run_dirs.push_back(entry.path());
    }
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  std::vector<LoadedRun> runs;
  bool any_ok = false;
  for (const auto& dir : run_dirs) {
    LoadedRun r;
    r.directory = dir.filename().string();
    try {
      auto j = nlohmann::json::parse(ReadText(dir / "run.json"));
      r.run = j.at("run").get<std::uint32_t>();
      r.design = j.at("design").get<std::string>();
      r.topic = j.at("topic").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.ok = j.at("ok").get<bool>();
      r.error = j.at("error").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kDecode, "bad " + (dir / "run.json").string() + ": " + e.what());
    }
    if (fs::is_directory(dir / "logs")) {
      for (const auto& entry : fs::directory_iterator(dir / "logs")) {
        if (entry.path().extension() != ".jsonl") continue;
        std::string stem = entry.path().stem().string();
        auto underscore = stem.find('_');
        if (underscore == std::string::npos) continue;
        r.logs[stem.substr(0, underscore) + "/" + stem.substr(underscore + 1)] =
            puppet::BehaviorLog::Load(entry.path().string());
      }
    }
    if (fs::exists(dir / "clone_verdict.json")) {
      auto j = nlohmann::json::parse(ReadText(dir / "clone_verdict.json"));
      for (const auto& a : j.at("accounts")) {
        r.clone_measurements.push_back({a.at("role").get<std::string>() + ":" +
                                            a.at("account_id").get<std::string>(),
                                        a.at("on_topic").get<std::uint64_t>(),
                                        a.at("fetched").get<std::uint64_t>()});
      }
    }
    any_ok = any_ok || r.ok;
    runs.push_back(std::move(r));
  }
  if (!any_ok) {
    throw Error(ErrorCode::kDegenerate, "no completed runs under " + results_dir);
  }
  return runs;
}

Analysis Analyze(const std::vector<LoadedRun>& runs, double confidence) {
  Analysis a;
  a.counts.columns = {"run", "design", "topic", "log", "on_topic", "videos", "prevalence",
                      "ci_lo", "ci_hi"};
  a.tests.columns = {"run", "design", "topic", "comparison", "x1", "n1", "x2", "n2", "z",
                     "critical", "mode", "significant", "direction"};
  a.tally.columns = {"topic", "design", "measure", "significant_runs", "runs"};
  a.curves.columns = {"run", "log", "index", "cumulative_on_topic"};

  // topic/design/measure -> (significant, runs)
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<int, int>> tally;
  auto count = [&](const LoadedRun& r, const std::string& measure, bool significant) {
    auto& t = tally[{r.topic, r.design, measure}];
    t.first += significant ? 1 : 0;
    t.second += 1;
  };

  std::vector<stats::Series> phase1_series;
  for (const auto& r : runs) {
    if (!r.ok) continue;
    const std::string run = std::to_string(r.run);
    for (const auto& [key, log] : r.logs) {
      if (log.entries.empty()) continue;
      auto x = log.OnTopicCount();
      auto n = log.entries.size();
      auto ci = stats::AgrestiCoull(x, n, confidence);
      a.counts.AddRow({run, r.design, r.topic, key, std::to_string(x), std::to_string(n),
                       stats::FormatNumber(static_cast<double>(x) / static_cast<double>(n)),
                       stats::FormatNumber(ci.lo), stats::FormatNumber(ci.hi)});
      auto curve = stats::CumulativeCurve(log.OnTopic());
      for (std::size_t i = 0; i < curve.size(); ++i) {
        a.curves.AddRow({run, key, std::to_string(i + 1), std::to_string(curve[i])});
      }
      if (key == "phase1/watch_topic" || key == "phase1/baseline") {
        phase1_series.push_back(
            {"run " + run + " " + key.substr(7), std::vector<double>(curve.begin(), curve.end())});
      }
    }

    for (const auto& c : RunComparisons(r.design, r.logs, confidence)) {
      std::vector<std::string> row = {run,
                                      r.design,
                                      r.topic,
                                      c.name,
                                      std::to_string(c.a.x),
                                      std::to_string(c.a.n),
                                      std::to_string(c.b.x),
                                      std::to_string(c.b.n)};
      if (c.verdict) {
        row.insert(row.end(), {stats::FormatNumber(c.verdict->z, 8),
                               stats::FormatNumber(c.verdict->critical, 8),
                               stats::TestModeName(c.verdict->mode),
                               c.verdict->significant ? "yes" : "no",
                               std::to_string(c.verdict->direction)});
      } else {
        row.insert(row.end(), {"", "", "", c.note, ""});
      }
      a.tests.AddRow(std::move(row));

      const bool sig = c.verdict && c.verdict->significant;
      const int dir = c.verdict ? c.verdict->direction : 0;
      if (c.name == "phase2_implicit_vs_explicit") {
        count(r, "implicit_more_than_explicit", sig && dir > 0);
        count(r, "explicit_more_than_implicit", sig && dir < 0);
      } else if (c.name == "phase3_relapse_implicit") {
        count(r, "relapse_implicit", sig);
      } else if (c.name == "phase3_relapse_explicit") {
        count(r, "relapse_explicit", sig);
      } else if (c.name == "watch_vs_implicit") {
        count(r, "watch_more_than_implicit", sig && dir > 0);
      } else if (c.name == "watch_vs_explicit") {
        count(r, "watch_more_than_explicit", sig && dir > 0);
      }
    }

    // Phase 2 + 3 trajectories per account.
    std::vector<stats::Series> accounts;
    for (const auto& [p2, p3] : Phase3Successor()) {
      auto it2 = r.logs.find("phase2/" + p2);
      if (it2 == r.logs.end()) continue;
      std::vector<bool> joined = it2->second.OnTopic();
      std::string label = p2;
      auto it3 = r.logs.find("phase3/" + p3);
      if (it3 != r.logs.end()) {
        auto more = it3->second.OnTopic();
        joined.insert(joined.end(), more.begin(), more.end());
        if (p3 != p2) label = p2 + " -> " + p3;
      }
      auto curve = stats::CumulativeCurve(joined);
      accounts.push_back({label, std::vector<double>(curve.begin(), curve.end())});
    }
    for (const char* extra : {"watch_1", "watch_2"}) {
      auto it = r.logs.find(std::string("phase2/") + extra);
      if (it == r.logs.end()) continue;
      auto curve = stats::CumulativeCurve(it->second.OnTopic());
      accounts.push_back({extra, std::vector<double>(curve.begin(), curve.end())});
    }
    if (!accounts.empty()) {
      a.figures[r.directory + "_curves.svg"] = stats::LineChartSvg(
          r.topic + " run " + run + ": phases 2-3", "video", "cumulative on-topic", accounts);
    }
    if (!r.clone_measurements.empty()) {
      std::vector<stats::IntervalBar> bars;
      for (const auto& m : r.clone_measurements) {
        bars.push_back({m.label,
                        static_cast<double>(m.on_topic) / static_cast<double>(m.fetched),
                        stats::AgrestiCoull(m.on_topic, m.fetched, confidence)});
      }
      a.figures[r.directory + "_clone_intervals.svg"] =
          stats::IntervalChartSvg(r.topic + " run " + run + ": fetch-mode prevalence", bars);
    }
  }
  if (!phase1_series.empty()) {
    a.figures["phase1_curves.svg"] = stats::LineChartSvg(
        "Phase 1 cumulative on-topic videos", "video", "cumulative on-topic", phase1_series);
  }
  for (const auto& [key, value] : tally) {
    const auto& [topic, design, measure] = key;
    a.tally.AddRow({topic, design, measure, std::to_string(value.first),
                    std::to_string(value.second)});
  }
  return a;
}

void WriteAnalysis(const Analysis& analysis, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  WriteText(out / "counts.tsv", analysis.counts.ToTsv());
  WriteText(out / "tests.tsv", analysis.tests.ToTsv());
  WriteText(out / "tally.tsv", analysis.tally.ToTsv());
  WriteText(out / "curves.tsv", analysis.curves.ToTsv());
  for (const auto& [name, svg] : analysis.figures) WriteText(out / name, svg);
}

}  // namespace fyp::orchestrator
