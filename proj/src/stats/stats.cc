#include "fyp/stats/stats.h"

#include <algorithm>
#include <cmath>

#include "fyp/common/error.h"

namespace fyp::stats {
namespace {

double Poly(const double* c, int n, double x) {
  double r = c[n - 1];
  for (int i = n - 2; i >= 0; --i) r = r * x + c[i];
  return r;
}

void CheckConfidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kConfig, "confidence must lie in (0, 1)");
  }
}

void CheckSample(const ProportionSample& s) {
  if (s.n == 0 || s.x > s.n) {
    throw Error(ErrorCode::kConfig, "invalid proportion sample " + std::to_string(s.x) + "/" +
                                        std::to_string(s.n));
  }
}

}  // namespace

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::kConfig, "quantile needs 0 < p < 1");
  static const double a[] = {3.387132872796366608,  133.14166789178437745, 1971.5909503065514427,
                             13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
                             33430.575583588128105, 2509.0809287301226727};
  static const double b[] = {1.0,
                             42.313330701600911252,
                             687.1870074920579083,
                             5394.1960214247511077,
                             21213.794301586595867,
                             39307.89580009271061,
                             28729.085735721942674,
                             5226.495278852545925};
  static const double c[] = {1.42343711074968357734,     4.6303378461565452959,
                             5.7694972214606914055,      3.64784832476320460504,
                             1.27045825245236838258,     0.24178072517745061177,
                             0.0227238449892691845833,   7.7454501427834140764e-4};
  static const double d[] = {1.0,
                             2.05319162663775882187,
                             1.6763848301838038494,
                             0.68976733498510000455,
                             0.14810397642748007459,
                             0.0151986665636164571966,
                             5.475938084995344946e-4,
                             1.05075007164441684324e-9};
  static const double e[] = {6.6579046435011037772,      5.4637849111641143699,
                             1.7848265399172913358,      0.29656057182850489123,
                             0.026532189526576123093,    0.0012426609473880784386,
                             2.71155556874348757815e-5,  2.01033439929228813265e-7};
  static const double f[] = {1.0,
                             0.59983220655588793769,
                             0.13692988092273580531,
                             0.0148753612908506148525,
                             7.868691311456132591e-4,
                             1.8463183175100546818e-5,
                             1.4215117583164458887e-7,
                             2.04426310338993978564e-15};
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * Poly(a, 8, r) / Poly(b, 8, r);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = Poly(c, 8, r) / Poly(d, 8, r);
  } else {
    r -= 5.0;
    value = Poly(e, 8, r) / Poly(f, 8, r);
  }
  return q < 0 ? -value : value;
}

double NormalUpperTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double TwoSidedCritical(double confidence) {
  CheckConfidence(confidence);
  return NormalQuantile(1.0 - (1.0 - confidence) / 2.0);
}

double OneSidedCritical(double confidence) {
  CheckConfidence(confidence);
  return NormalQuantile(confidence);
}

Interval AgrestiCoull(std::uint64_t x, std::uint64_t n, double confidence) {
  CheckSample({x, n});
  const double z = TwoSidedCritical(confidence);
  const double z2 = z * z;
  const double n_tilde = static_cast<double>(n) + z2;
  const double p_tilde = (static_cast<double>(x) + z2 / 2.0) / n_tilde;
  const double half = z * std::sqrt(p_tilde * (1.0 - p_tilde) / n_tilde);
  return {std::max(0.0, p_tilde - half), std::min(1.0, p_tilde + half)};
}

const char* TestModeName(TestMode mode) {
  return mode == TestMode::kTwoSided ? "two_sided" : "one_sided_greater";
}

TestVerdict TwoProportionZTest(const ProportionSample& s1, const ProportionSample& s2,
                               double confidence, TestMode mode) {
  CheckSample(s1);
  CheckSample(s2);
  CheckConfidence(confidence);
  const double n1 = static_cast<double>(s1.n);
  const double n2 = static_cast<double>(s2.n);
  const double pooled = static_cast<double>(s1.x + s2.x) / (n1 + n2);
  if (pooled <= 0.0 || pooled >= 1.0) {
    throw Error(ErrorCode::kDegenerate, "pooled proportion is " + std::to_string(pooled) +
                                            "; the test statistic is undefined");
  }
  TestVerdict v;
  v.confidence = confidence;
  v.mode = mode;
  const double diff = s1.proportion() - s2.proportion();
  v.direction = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
  v.z = diff / std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (mode == TestMode::kTwoSided) {
    v.critical = TwoSidedCritical(confidence);
    v.significant = std::fabs(v.z) > v.critical;
    v.p_value = std::min(1.0, 2.0 * NormalUpperTail(std::fabs(v.z)));
  } else {
    v.critical = OneSidedCritical(confidence);
    v.significant = v.z > v.critical;
    v.p_value = NormalUpperTail(v.z);
  }
  return v;
}

std::vector<std::uint32_t> CumulativeCurve(const std::vector<bool>& on_topic) {
  std::vector<std::uint32_t> out;
  out.reserve(on_topic.size());
  std::uint32_t running = 0;
  for (bool b : on_topic) {
    running += b ? 1 : 0;
    out.push_back(running);
  }
  return out;
}

TestVerdict DetectRelapse(const std::vector<bool>& ceases_on_topic,
                          const std::vector<bool>& continues_on_topic, double confidence) {
  if (ceases_on_topic.size() != continues_on_topic.size() || ceases_on_topic.empty()) {
    throw Error(ErrorCode::kConfig, "relapse logs must be non-empty and of equal length");
  }
  auto count = [](const std::vector<bool>& v) {
    return static_cast<std::uint64_t>(std::count(v.begin(), v.end(), true));
  };
  return TwoProportionZTest({count(ceases_on_topic), ceases_on_topic.size()},
                            {count(continues_on_topic), continues_on_topic.size()}, confidence,
                            TestMode::kOneSidedGreater);
}

}  // namespace fyp::stats
