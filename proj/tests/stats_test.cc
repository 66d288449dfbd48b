#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "fyp/common/error.h"
#include "fyp/stats/report.h"
#include "fyp/stats/stats.h"
#include "gtest/gtest.h"

namespace fyp::stats {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInfrastructure;
}

TEST(NormalTest, QuantileMatchesBoost) {
  boost::math::normal_distribution<double> n;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1e-12, 1 - 1e-12);
  for (int i = 0; i < 5000; ++i) {
    double p = u(rng);
    double expected = boost::math::quantile(n, p);
    ASSERT_NEAR(NormalQuantile(p), expected, 1e-9 * std::max(1.0, std::abs(expected))) << p;
  }
  EXPECT_NEAR(NormalQuantile(0.995), 2.575829303548900, 1e-12);
  EXPECT_NEAR(NormalQuantile(0.99), 2.326347874040841, 1e-12);
  EXPECT_EQ(NormalQuantile(0.5), 0.0);
  EXPECT_THROW(NormalQuantile(0.0), Error);
  EXPECT_THROW(NormalQuantile(1.0), Error);
}

TEST(NormalTest, UpperTailMatchesBoost) {
  boost::math::normal_distribution<double> n;
  for (double z = -8; z <= 8; z += 0.37) {
    EXPECT_NEAR(NormalUpperTail(z), boost::math::cdf(boost::math::complement(n, z)), 1e-15);
  }
}

TEST(NormalTest, CriticalValues) {
  EXPECT_NEAR(TwoSidedCritical(0.99), 2.5758293035489, 1e-12);
  EXPECT_NEAR(OneSidedCritical(0.99), 2.3263478740408, 1e-12);
  EXPECT_NEAR(TwoSidedCritical(0.95), 1.959963984540054, 1e-12);
}

TEST(AgrestiCoullTest, FrozenReferenceValues) {
  struct Case {
    std::uint64_t x, n;
    double lo, hi;
  };
  for (const Case& c : {Case{17, 200, 0.044970619166073, 0.151680078607792},
                        Case{89, 200, 0.357679953425700, 0.535852066761198},
                        Case{0, 200, 0.0, 0.038576327700918},
                        Case{200, 200, 0.961423672299082, 1.0},
                        Case{3, 200, 0.0, 0.061422049677298}}) {
    Interval iv = AgrestiCoull(c.x, c.n, 0.99);
    EXPECT_NEAR(iv.lo, c.lo, 1e-12) << c.x << "/" << c.n;
    EXPECT_NEAR(iv.hi, c.hi, 1e-12) << c.x << "/" << c.n;
  }
}

TEST(AgrestiCoullTest, InvalidInputs) {
  EXPECT_EQ(CodeOf([] { AgrestiCoull(1, 0, 0.99); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { AgrestiCoull(5, 4, 0.99); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { AgrestiCoull(1, 4, 1.0); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { AgrestiCoull(1, 4, 0.0); }), ErrorCode::kConfig);
}

TEST(AgrestiCoullTest, CoverageAtLeastNominal) {
  std::mt19937_64 rng(7);
  for (double p : {0.05, 0.3, 0.5}) {
    std::binomial_distribution<std::uint64_t> draw(200, p);
    int covered = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      Interval iv = AgrestiCoull(draw(rng), 200, 0.99);
      covered += (iv.lo <= p && p <= iv.hi) ? 1 : 0;
    }
    EXPECT_GE(covered, static_cast<int>(0.985 * draws)) << p;
  }
}

TEST(AgrestiCoullTest, OverlapIsSymmetricAndInclusive) {
  Interval a{0.1, 0.2}, b{0.2, 0.3}, c{0.21, 0.3};
  EXPECT_TRUE(a.Overlaps(b));
  EXPECT_TRUE(b.Overlaps(a));
  EXPECT_FALSE(a.Overlaps(c));
  EXPECT_FALSE(c.Overlaps(a));
}

TEST(ZTestTest, PublishedComparison) {
  TestVerdict v = TwoProportionZTest({122, 400}, {64, 400}, 0.99, TestMode::kTwoSided);
  EXPECT_NEAR(v.z, 4.854363899311614, 1e-12);
  EXPECT_TRUE(v.significant);
  EXPECT_EQ(v.direction, 1);
  EXPECT_GT(v.z, TwoSidedCritical(0.99));
  EXPECT_NEAR(v.p_value, 2 * NormalUpperTail(v.z), 1e-18);
}

TEST(ZTestTest, IdenticalSamples) {
  TestVerdict v = TwoProportionZTest({19, 400}, {19, 400}, 0.99, TestMode::kTwoSided);
  EXPECT_EQ(v.z, 0.0);
  EXPECT_FALSE(v.significant);
  EXPECT_EQ(v.direction, 0);
}

TEST(ZTestTest, ExplicitMatchesBaseline) {
  // 4.75% explicit vs a baseline at the same proportion (half the trials).
  TestVerdict v = TwoProportionZTest({19, 400}, {19, 400}, 0.99, TestMode::kTwoSided);
  EXPECT_FALSE(v.significant);
}

TEST(ZTestTest, DegenerateAndInvalid) {
  EXPECT_EQ(CodeOf([] { TwoProportionZTest({0, 200}, {0, 200}, 0.99, TestMode::kTwoSided); }),
            ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { TwoProportionZTest({200, 200}, {100, 100}, 0.99, TestMode::kTwoSided); }),
            ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { TwoProportionZTest({3, 2}, {1, 2}, 0.99, TestMode::kTwoSided); }),
            ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { TwoProportionZTest({1, 0}, {1, 2}, 0.99, TestMode::kTwoSided); }),
            ErrorCode::kConfig);
}

TEST(ZTestTest, OneSidedIsDirectional) {
  TestVerdict up = TwoProportionZTest({60, 200}, {30, 200}, 0.99, TestMode::kOneSidedGreater);
  EXPECT_TRUE(up.significant);
  EXPECT_EQ(up.critical, OneSidedCritical(0.99));
  TestVerdict down = TwoProportionZTest({30, 200}, {60, 200}, 0.99, TestMode::kOneSidedGreater);
  EXPECT_FALSE(down.significant);
  EXPECT_LT(down.z, 0);
  // Between the one- and two-sided critical values.
  TestVerdict mid = TwoProportionZTest({62, 200}, {40, 200}, 0.99, TestMode::kOneSidedGreater);
  TestVerdict mid2 = TwoProportionZTest({62, 200}, {40, 200}, 0.99, TestMode::kTwoSided);
  EXPECT_GT(mid.z, OneSidedCritical(0.99));
  EXPECT_LT(mid.z, TwoSidedCritical(0.99));
  EXPECT_TRUE(mid.significant);
  EXPECT_FALSE(mid2.significant);
  EXPECT_STREQ(TestModeName(TestMode::kOneSidedGreater), "one_sided_greater");
  EXPECT_STREQ(TestModeName(TestMode::kTwoSided), "two_sided");
}

TEST(ZTestTest, SymmetryAndScale) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t n1 = 1 + rng() % 500, n2 = 1 + rng() % 500;
    std::uint64_t x1 = rng() % (n1 + 1), x2 = rng() % (n2 + 1);
    if (x1 + x2 == 0 || x1 + x2 == n1 + n2) continue;
    TestVerdict a = TwoProportionZTest({x1, n1}, {x2, n2}, 0.99, TestMode::kTwoSided);
    TestVerdict b = TwoProportionZTest({x2, n2}, {x1, n1}, 0.99, TestMode::kTwoSided);
    ASSERT_NEAR(a.z, -b.z, 1e-12);
    ASSERT_EQ(a.significant, b.significant);
    ASSERT_EQ(a.direction, -b.direction);
    TestVerdict d = TwoProportionZTest({2 * x1, 2 * n1}, {2 * x2, 2 * n2}, 0.99,
                                       TestMode::kTwoSided);
    ASSERT_GE(std::abs(d.z), std::abs(a.z) - 1e-12);
  }
}

TEST(CurveTest, Shapes) {
  EXPECT_EQ(CumulativeCurve(std::vector<bool>(200, false)), std::vector<std::uint32_t>(200, 0));
  auto all = CumulativeCurve(std::vector<bool>(200, true));
  ASSERT_EQ(all.size(), 200u);
  EXPECT_EQ(all.back(), 200u);
  EXPECT_TRUE(CumulativeCurve({}).empty());
}

TEST(CurveTest, MonotoneUnitSteps) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<bool> log(1 + rng() % 300);
    std::uint32_t total = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
      log[i] = rng() % 3 == 0;
      total += log[i];
    }
    auto curve = CumulativeCurve(log);
    ASSERT_EQ(curve.size(), log.size());
    ASSERT_EQ(curve.back(), total);
    ASSERT_LE(curve.front(), 1u);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      ASSERT_GE(curve[i], curve[i - 1]);
      ASSERT_LE(curve[i] - curve[i - 1], 1u);
    }
  }
}

TEST(RelapseTest, OneSidedVerdict) {
  std::vector<bool> ceases(200, false), continues(200, false);
  for (int i = 0; i < 60; ++i) ceases[i * 3] = true;
  for (int i = 0; i < 20; ++i) continues[i * 9] = true;
  TestVerdict v = DetectRelapse(ceases, continues, 0.99);
  EXPECT_TRUE(v.significant);
  EXPECT_EQ(v.mode, TestMode::kOneSidedGreater);
  EXPECT_FALSE(DetectRelapse(continues, ceases, 0.99).significant);
  EXPECT_EQ(CodeOf([&] { DetectRelapse(ceases, std::vector<bool>(10), 0.99); }),
            ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { DetectRelapse(std::vector<bool>(200), std::vector<bool>(200), 0.99); }),
            ErrorCode::kDegenerate);
}

TEST(ReportTest, TableToTsv) {
  Table t{{"a", "b"}, {}};
  t.AddRow({"1", "x"});
  EXPECT_EQ(t.ToTsv(), "a\tb\n1\tx\n");
  EXPECT_THROW(t.AddRow({"only one"}), Error);
  EXPECT_THROW(t.AddRow({"tab\there", "x"}), Error);
}

TEST(ReportTest, FormatNumber) {
  EXPECT_EQ(FormatNumber(89), "89");
  EXPECT_EQ(FormatNumber(-3), "-3");
  EXPECT_EQ(FormatNumber(0.445), "0.445");
  EXPECT_EQ(FormatNumber(4.854363899311614), "4.85436");
  EXPECT_EQ(FormatNumber(4.854363899311614, 3), "4.85");
}

TEST(ReportTest, SvgCharts) {
  std::string line = LineChartSvg("Cooking", "videos", "on-topic",
                                  {{"watch", {1, 2, 3}}, {"base & co", {0, 0, 1}}});
  EXPECT_TRUE(line.starts_with("<svg"));
  EXPECT_NE(line.find("base &amp; co"), std::string::npos);
  EXPECT_NE(line.find("</svg>"), std::string::npos);
  std::string bars = IntervalChartSvg("Clones", {{"original", 0.44, {0.36, 0.53}},
                                                 {"baseline", 0.085, {0.045, 0.15}}});
  EXPECT_NE(bars.find("original"), std::string::npos);
  EXPECT_NE(bars.find("</svg>"), std::string::npos);
  EXPECT_EQ(LineChartSvg("t", "x", "y", {}), LineChartSvg("t", "x", "y", {}));
}

}  // namespace
}  // namespace fyp::stats
