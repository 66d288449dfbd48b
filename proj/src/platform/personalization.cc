#include "fyp/platform/personalization.h"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace fyp::platform {

double SignalWeight(const Calibration& calibration, SignalKind kind) {
  switch (kind) {
    case SignalKind::kWatchFull: return calibration.w_watch_full;
    case SignalKind::kWatchPartial: return calibration.w_watch_partial;
    case SignalKind::kSkip: return calibration.w_skip;
    case SignalKind::kNotInterested: return calibration.w_not_interested;
  }
  return 0.0;
}

void ApplySignal(AccountState& state, const std::vector<std::string>& topics, SignalKind kind,
                 const Calibration& calibration) {
  const double w = SignalWeight(calibration, kind);
  const bool positive = kind == SignalKind::kWatchFull || kind == SignalKind::kWatchPartial;
  for (const auto& topic : topics) {
    double& score = state.affinity[topic];
    if (positive && score < 0.0) score *= calibration.negative_decay;
    score = std::clamp(score + w, calibration.score_floor, calibration.score_cap);
  }
}

double DeliveryFloor(const Calibration& calibration, const TopicProfile& topic) {
  return topic.base_prevalence * calibration.p_floor_ratio;
}

double DeliveryBoost(const Calibration& calibration, const TopicProfile& topic, double affinity) {
  if (affinity >= 0.0) return calibration.gain * affinity;
  const double drop = topic.base_prevalence - DeliveryFloor(calibration, topic);
  return drop * (affinity / -calibration.score_floor);
}

double DeliveryProbability(const AccountState& state, const TopicProfile& topic,
                           const Calibration& calibration) {
  auto it = state.affinity.find(topic.topic_id);
  const double affinity = it == state.affinity.end() ? 0.0 : it->second;
  const double lo = DeliveryFloor(calibration, topic);
  const double hi = std::max(calibration.p_cap, lo);
  return std::clamp(topic.base_prevalence + DeliveryBoost(calibration, topic, affinity), lo, hi);
}

std::vector<std::size_t> AssignSlots(const std::vector<double>& probabilities,
                                     std::uint32_t count, PageSampling sampling, Rng& rng) {
  const std::size_t off_topic = probabilities.size();
  double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  const double scale = total > 1.0 ? 1.0 / total : 1.0;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (double p : probabilities) {
    acc += p * scale;
    cumulative.push_back(acc);
  }
  auto slot_for = [&](double u) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<std::size_t>(it - cumulative.begin());
  };

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> slots;
  slots.reserve(count);
  if (sampling == PageSampling::kIid) {
    for (std::uint32_t k = 0; k < count; ++k) slots.push_back(std::min(slot_for(unit(rng)), off_topic));
    return slots;
  }
  const double offset = unit(rng);
  for (std::uint32_t k = 0; k < count; ++k) {
    slots.push_back(std::min(slot_for((offset + k) / count), off_topic));
  }
  std::shuffle(slots.begin(), slots.end(), rng);
  return slots;
}

namespace {

// Uniform pick among pool entries not yet excluded. Random probes first,
// then a scan from a random start so exhaustion is detected exactly.
std::optional<std::uint32_t> PickUnseen(const std::vector<std::uint32_t>& pool,
                                        const Corpus& corpus, const AccountState& state,
                                        const std::unordered_set<std::uint32_t>& on_page,
                                        Rng& rng) {
  if (pool.empty()) return std::nullopt;
  auto usable = [&](std::uint32_t idx) {
    return !on_page.contains(idx) &&
           !state.seen_video_ids.contains(corpus.videos()[idx].video_id);
  };
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::uint32_t idx = pool[d(rng)];
    if (usable(idx)) return idx;
  }
  const std::size_t start = d(rng);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::uint32_t idx = pool[(start + i) % pool.size()];
    if (usable(idx)) return idx;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::uint32_t> ComposePage(const AccountState& state, const Corpus& corpus,
                                       const Calibration& calibration, std::uint32_t count,
                                       Rng& rng) {
  std::vector<double> probabilities;
  for (const auto& topic : corpus.topics()) {
    probabilities.push_back(DeliveryProbability(state, topic, calibration));
  }
  const auto slots = AssignSlots(probabilities, count, calibration.sampling, rng);

  std::vector<std::uint32_t> page;
  std::unordered_set<std::uint32_t> on_page;
  for (std::size_t slot : slots) {
    std::optional<std::uint32_t> pick;
    if (slot < corpus.topics().size()) {
      pick = PickUnseen(corpus.TopicPool(slot), corpus, state, on_page, rng);
    }
    if (!pick) pick = PickUnseen(corpus.OffTopicPool(), corpus, state, on_page, rng);
    if (!pick) continue;
    on_page.insert(*pick);
    page.push_back(*pick);
  }
  return page;
}

}  // namespace fyp::platform
