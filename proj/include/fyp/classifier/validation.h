#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fyp::classifier {

// Binary (on-topic yes/no) labels of a fixed rater panel.
struct RatingMatrix {
  std::vector<std::string> item_ids;
  std::vector<std::string> rater_ids;
  // labels[item][rater]; every row has rater_ids.size() entries.
  std::vector<std::vector<bool>> labels;

  std::size_t items() const { return labels.size(); }
  std::size_t raters() const { return rater_ids.size(); }
};

// Fleiss' kappa from per-item category counts; every row must sum to the
// same rater count n >= 2, with at least two items. Throws
// Error(kDegenerate) when chance agreement is 1 (a single category used).
double FleissKappa(const std::vector<std::vector<int>>& counts);
double FleissKappa(const RatingMatrix& matrix);

enum class Vote { kNo, kYes, kTie };

// Strict majority per item; anything else is a tie.
std::vector<Vote> MajorityVote(const RatingMatrix& matrix);

struct ValidationReport {
  std::optional<double> fleiss_kappa;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t tie_count = 0;
};

// On-topic is the positive class. Precision (recall) is 0 when nothing is
// predicted (actually) positive; F1 is 0 when both are 0. Throws
// Error(kConfig) on length mismatch and Error(kDegenerate) when empty.
ValidationReport ConfusionMetrics(const std::vector<bool>& predicted,
                                  const std::vector<bool>& gold);

// F1 from precision and recall alone.
double F1Score(double precision, double recall);

// Compares classifier output with the raters' majority vote. Tied items are
// excluded from the metrics and counted in tie_count. Items missing from
// `predicted` raise Error(kConfig).
ValidationReport ValidateClassifier(const RatingMatrix& ratings,
                                    const std::map<std::string, bool>& predicted);

// Reads "item_id,rater_id,label" lines (comma or tab separated; an optional
// header line is skipped; labels yes/no, 1/0, true/false). Every item must
// be rated by the same set of raters exactly once.
RatingMatrix ParseRatings(const std::string& text);
RatingMatrix LoadRatings(const std::string& path);

}  // namespace fyp::classifier
