#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fyp/orchestrator/experiment.h"
#include "fyp/puppet/agent.h"
#include "fyp/stats/report.h"

namespace fyp::orchestrator {

// The statistical comparisons of a run design, recomputed from its logs
// ("phase2/gives_implicit_1" style keys). Paired treatment accounts are
// pooled (x summed over both accounts, n = 2 * phase length).
std::vector<Comparison> RunComparisons(const std::string& design,
                                       const std::map<std::string, puppet::BehaviorLog>& logs,
                                       double confidence);

struct LoadedRun {
  std::uint32_t run = 0;
  std::string directory;
  std::string design;
  std::string topic;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::map<std::string, puppet::BehaviorLog> logs;
  // (label, on_topic, fetched) rows from the clone verdict, if any.
  struct Measured {
    std::string label;
    std::uint64_t on_topic = 0;
    std::uint64_t fetched = 0;
  };
  std::vector<Measured> clone_measurements;
};

// Reads every run directory under `results_dir` without modifying it.
// Throws Error(kConfig) if the directory is missing and Error(kDegenerate)
// if it holds no completed run.
std::vector<LoadedRun> LoadResults(const std::string& results_dir);

struct Analysis {
  stats::Table counts;       // per run and log: on-topic count, prevalence, CI
  stats::Table tests;        // per run and comparison: z-test
  stats::Table tally;        // per topic and measure: significant runs / runs
  stats::Table curves;       // cumulative on-topic series
  std::map<std::string, std::string> figures;  // file name -> SVG
};

Analysis Analyze(const std::vector<LoadedRun>& runs, double confidence);

// Writes counts.tsv, tests.tsv, tally.tsv, curves.tsv and the figures.
void WriteAnalysis(const Analysis& analysis, const std::string& out_dir);

}  // namespace fyp::orchestrator
