#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fyp/clone/clone.h"
#include "fyp/config/config.h"
#include "fyp/platform/corpus.h"
#include "fyp/puppet/agent.h"
#include "fyp/stats/stats.h"

namespace fyp::orchestrator {

// Account labels of one run. Phase 3 renames the Phase 2 treatment
// accounts: implicit_1 ceases, implicit_2 continues (same for explicit).
inline constexpr char kWatchTopic[] = "watch_topic";
inline constexpr char kBaseline[] = "baseline";
inline constexpr char kClonedBaseline[] = "cloned_baseline";
inline constexpr char kNonClonedBaseline[] = "non_cloned_baseline";
inline constexpr char kImplicit1[] = "gives_implicit_1";
inline constexpr char kImplicit2[] = "gives_implicit_2";
inline constexpr char kExplicit1[] = "gives_explicit_1";
inline constexpr char kExplicit2[] = "gives_explicit_2";
inline constexpr char kWatch1[] = "watch_1";
inline constexpr char kWatch2[] = "watch_2";

// A comparison reported as a z-test, or the reason there is none.
struct Comparison {
  std::string name;
  stats::ProportionSample a;
  stats::ProportionSample b;
  std::optional<stats::TestVerdict> verdict;
  std::string note;  // "degenerate" when the pooled proportion is 0 or 1
};

Comparison Compare(std::string name, stats::ProportionSample a, stats::ProportionSample b,
                   double confidence, stats::TestMode mode);

struct RunResult {
  std::uint32_t run = 0;  // 1-based
  std::uint64_t seed = 0;
  std::string design;     // "three_phase" or "signal_comparison"
  std::string directory;  // run directory (relative to the results root)
  bool ok = false;
  std::string error;
  // "phase1/watch_topic" -> log, etc.
  std::map<std::string, puppet::BehaviorLog> logs;
  std::optional<clone::CloneVerdict> verdict;
  // Clone replays reproduced the source's FYP-signal affinity exactly.
  std::map<std::string, bool> replay_state_equal;
  std::vector<Comparison> comparisons;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
};

// Executes experiments against an in-process platform (one fresh platform
// per run, seeded with the run seed) or a remote one, recording all agent
// traffic through a RecordingTransport into the run directory.
class Orchestrator {
 public:
  explicit Orchestrator(config::Config config);

  // The full Phase 1 -> 2 -> 3 flow for every run of the plan. Per-run
  // failures are recorded and do not stop later runs.
  ExperimentResult RunExperiment();
  // Phase 1, then the Phase 1 watch account cloned into two watching, two
  // implicit and two explicit accounts (plus both baselines) scrolled for
  // one phase; compares watch against each signal type.
  ExperimentResult RunSignalComparison();

  const config::Config& config() const { return config_; }

 private:
  struct RunContext;

  RunResult RunOne(std::uint32_t run, const std::string& design);
  std::unique_ptr<Transport> MakeUpstream(std::uint64_t run_seed);
  void RunThreePhase(RunContext& ctx, RunResult& result);
  void RunComparison(RunContext& ctx, RunResult& result);

  config::Config config_;
  std::shared_ptr<const platform::Corpus> corpus_;
  std::shared_ptr<const wire::Dictionary> dictionary_;
};

// Writes ExperimentResult-level files (summary.tsv, runs.json) under the
// results root. Run directories are written as the runs progress.
void WriteExperimentSummary(const std::string& results_dir, const ExperimentResult& result,
                            const config::Config& config);

}  // namespace fyp::orchestrator
