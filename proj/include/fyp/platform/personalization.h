#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fyp/common/seed.h"
#include "fyp/platform/corpus.h"
#include "fyp/platform/types.h"

namespace fyp::platform {

// Signal weight for `kind` under `calibration`.
double SignalWeight(const Calibration& calibration, SignalKind kind);

// affinity[t] <- clamp(affinity[t] + w_kind, floor, cap) for each t in
// `topics`. Positive kinds first scale a negative score by negative_decay.
// Topics not in `topics` are untouched.
void ApplySignal(AccountState& state, const std::vector<std::string>& topics, SignalKind kind,
                 const Calibration& calibration);

// Monotone link from affinity to the additive delivery boost; g(0) = 0.
// Linear with slope `gain` above zero; below zero it falls linearly from
// base to p_floor as affinity goes from 0 to score_floor.
double DeliveryBoost(const Calibration& calibration, const TopicProfile& topic, double affinity);

double DeliveryFloor(const Calibration& calibration, const TopicProfile& topic);

// clamp(base + g(affinity), p_floor, p_cap).
double DeliveryProbability(const AccountState& state, const TopicProfile& topic,
                           const Calibration& calibration);

// Picks up to `count` unseen video indices for a page. Topic slots follow
// the delivery probabilities (normalized if they sum past 1); the rest are
// off-topic. Exhausted pools fall back to off-topic, and the page shrinks
// once everything unseen is gone.
std::vector<std::uint32_t> ComposePage(const AccountState& state, const Corpus& corpus,
                                       const Calibration& calibration, std::uint32_t count,
                                       Rng& rng);

// Assigns each of `count` slots a topic index (topics.size() = off-topic).
// Systematic sampling gives every topic floor or ceil of count*p slots.
std::vector<std::size_t> AssignSlots(const std::vector<double>& probabilities,
                                     std::uint32_t count, PageSampling sampling, Rng& rng);

}  // namespace fyp::platform
