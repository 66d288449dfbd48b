#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fyp::stats {

// Standard normal quantile (Wichura's AS241, about 1e-16 relative
// accuracy). Requires 0 < p < 1.
double NormalQuantile(double p);
// Standard normal upper tail probability P(Z > z).
double NormalUpperTail(double z);

// Two-sided critical value for a confidence level, e.g. 2.5758 for 0.99.
double TwoSidedCritical(double confidence);
double OneSidedCritical(double confidence);

struct ProportionSample {
  std::uint64_t x = 0;
  std::uint64_t n = 0;

  double proportion() const { return static_cast<double>(x) / static_cast<double>(n); }
};

struct Interval {
  double lo = 0;
  double hi = 0;

  bool Overlaps(const Interval& other) const { return lo <= other.hi && other.lo <= hi; }
  bool operator==(const Interval&) const = default;
};

// Agresti-Coull interval clamped to [0, 1]. Throws Error(kConfig) unless
// n >= 1, x <= n and 0 < confidence < 1.
Interval AgrestiCoull(std::uint64_t x, std::uint64_t n, double confidence);

enum class TestMode { kTwoSided, kOneSidedGreater };

const char* TestModeName(TestMode mode);

struct TestVerdict {
  double z = 0;
  bool significant = false;
  // Sign of p1 - p2.
  int direction = 0;
  double confidence = 0;
  TestMode mode = TestMode::kTwoSided;
  double critical = 0;
  double p_value = 1;
};

// Pooled two-proportion z-test. Throws Error(kDegenerate) when the pooled
// proportion is 0 or 1, Error(kConfig) on invalid samples.
TestVerdict TwoProportionZTest(const ProportionSample& s1, const ProportionSample& s2,
                               double confidence, TestMode mode);

// Running count of on-topic entries: element i is the count over the first
// i + 1 entries.
std::vector<std::uint32_t> CumulativeCurve(const std::vector<bool>& on_topic);

// One-sided test that the ceases account saw more on-topic videos than its
// continues twin; relapse iff significant. Logs must have equal length.
TestVerdict DetectRelapse(const std::vector<bool>& ceases_on_topic,
                          const std::vector<bool>& continues_on_topic, double confidence);

}  // namespace fyp::stats
