#include "fyp/classifier/validation.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fyp/common/error.h"
#include "fyp/common/text.h"

namespace fyp::classifier {

double FleissKappa(const std::vector<std::vector<int>>& counts) {
  if (counts.size() < 2) throw Error(ErrorCode::kConfig, "kappa needs at least two items");
  const std::size_t k = counts.front().size();
  if (k < 2) throw Error(ErrorCode::kConfig, "kappa needs at least two categories");
  long long n = 0;
  for (int c : counts.front()) n += c;
  if (n < 2) throw Error(ErrorCode::kConfig, "kappa needs at least two raters per item");

  std::vector<double> category_totals(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : counts) {
    if (row.size() != k) throw Error(ErrorCode::kConfig, "ragged rating counts");
    long long row_sum = 0;
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (row[j] < 0) throw Error(ErrorCode::kConfig, "negative rating count");
      row_sum += row[j];
      sq += static_cast<double>(row[j]) * row[j];
      category_totals[j] += row[j];
    }
    if (row_sum != n) throw Error(ErrorCode::kConfig, "items rated by differing rater counts");
    p_bar += (sq - static_cast<double>(n)) / (static_cast<double>(n) * (n - 1));
  }
  const double items = static_cast<double>(counts.size());
  p_bar /= items;
  double p_e = 0.0;
  for (double total : category_totals) {
    double p = total / (items * static_cast<double>(n));
    p_e += p * p;
  }
  if (p_e >= 1.0) {
    throw Error(ErrorCode::kDegenerate, "kappa undefined: all ratings in one category");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

namespace {

std::vector<std::vector<int>> CountLabels(const RatingMatrix& matrix) {
  std::vector<std::vector<int>> counts;
  for (const auto& row : matrix.labels) {
    if (row.size() != matrix.raters()) throw Error(ErrorCode::kConfig, "ragged rating matrix");
    int yes = static_cast<int>(std::count(row.begin(), row.end(), true));
    counts.push_back({static_cast<int>(row.size()) - yes, yes});
  }
  return counts;
}

bool ParseLabel(const std::string& raw) {
  std::string label = ToLower(raw);
  if (label == "yes" || label == "y" || label == "1" || label == "true") return true;
  if (label == "no" || label == "n" || label == "0" || label == "false") return false;
  throw Error(ErrorCode::kConfig, "bad rating label '" + raw + "'");
}

std::string Trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

double FleissKappa(const RatingMatrix& matrix) { return FleissKappa(CountLabels(matrix)); }

std::vector<Vote> MajorityVote(const RatingMatrix& matrix) {
  std::vector<Vote> out;
  for (const auto& row : matrix.labels) {
    std::size_t yes = std::count(row.begin(), row.end(), true);
    std::size_t no = row.size() - yes;
    if (2 * yes > row.size()) {
      out.push_back(Vote::kYes);
    } else if (2 * no > row.size()) {
      out.push_back(Vote::kNo);
    } else {
      out.push_back(Vote::kTie);
    }
  }
  return out;
}

double F1Score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

ValidationReport ConfusionMetrics(const std::vector<bool>& predicted,
                                  const std::vector<bool>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kConfig, "predicted and gold label counts differ");
  }
  if (gold.empty()) throw Error(ErrorCode::kDegenerate, "no labels to score");
  ValidationReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] && gold[i]) ++r.tp;
    else if (predicted[i]) ++r.fp;
    else if (gold[i]) ++r.fn;
    else ++r.tn;
  }
  const double total = static_cast<double>(gold.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  r.precision = r.tp + r.fp == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = r.tp + r.fn == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.f1 = F1Score(r.precision, r.recall);
  return r;
}

ValidationReport ValidateClassifier(const RatingMatrix& ratings,
                                    const std::map<std::string, bool>& predicted) {
  auto votes = MajorityVote(ratings);
  std::vector<bool> pred, gold;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == Vote::kTie) {
      ++ties;
      continue;
    }
    auto it = predicted.find(ratings.item_ids[i]);
    if (it == predicted.end()) {
      throw Error(ErrorCode::kConfig, "no prediction for item " + ratings.item_ids[i]);
    }
    pred.push_back(it->second);
    gold.push_back(votes[i] == Vote::kYes);
  }
  ValidationReport r = ConfusionMetrics(pred, gold);
  r.tie_count = ties;
  try {
    r.fleiss_kappa = FleissKappa(ratings);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
  }
  return r;
}

RatingMatrix ParseRatings(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> item_order;
  std::map<std::string, std::map<std::string, bool>> by_item;
  std::set<std::string> raters;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    char sep = line.find('\t') != std::string::npos ? '\t' : ',';
    auto fields = Split(line, sep);
    if (fields.size() != 3) {
      throw Error(ErrorCode::kConfig, "ratings line " + std::to_string(line_no) +
                                          ": expected item_id,rater_id,label");
    }
    for (auto& f : fields) f = Trim(f);
    if (line_no == 1 && ToLower(fields[0]) == "item_id") continue;
    bool label = ParseLabel(fields[2]);
    auto [it, fresh] = by_item.try_emplace(fields[0]);
    if (fresh) item_order.push_back(fields[0]);
    if (!it->second.emplace(fields[1], label).second) {
      throw Error(ErrorCode::kConfig, "duplicate rating of item " + fields[0] + " by " + fields[1]);
    }
    raters.insert(fields[1]);
  }
  RatingMatrix m;
  m.rater_ids.assign(raters.begin(), raters.end());
  for (const auto& id : item_order) {
    const auto& row = by_item[id];
    if (row.size() != raters.size()) {
      throw Error(ErrorCode::kConfig, "item " + id + " is not rated by every rater");
    }
    m.item_ids.push_back(id);
    std::vector<bool> labels;
    for (const auto& r : m.rater_ids) labels.push_back(row.at(r));
    m.labels.push_back(std::move(labels));
  }
  return m;
}

RatingMatrix LoadRatings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open ratings file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRatings(ss.str());
}

}  // namespace fyp::classifier
