#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "test_support.hpp"
#include "tickbound/freq_moments.hpp"

using namespace tickbound;
using tickbound::testing::rel_diff;

TEST(Moment, SmallSeries) {
  const std::vector<double> xs{2, 4, 6};
  EXPECT_DOUBLE_EQ(moment(xs, 1), 4.0);
  EXPECT_DOUBLE_EQ(moment(xs, 2), 56.0 / 3.0);
  EXPECT_DOUBLE_EQ(moment(xs, 3), (8.0 + 64.0 + 216.0) / 3.0);
  EXPECT_DOUBLE_EQ(moment(xs, 4), (16.0 + 256.0 + 1296.0) / 3.0);
}

TEST(Moment, ConstantSeriesGivesPowers) {
  const std::vector<double> xs(17, 1.5);
  for (int n = 1; n <= 4; ++n) EXPECT_DOUBLE_EQ(moment(xs, n), std::pow(1.5, n));
}

TEST(Moment, EmptySeriesAndBadOrder) {
  const std::vector<double> none;
  try {
    (void)moment(none, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_window);
  }
  const std::vector<double> xs{1, 2};
  EXPECT_THROW((void)moment(xs, 0), Error);
  EXPECT_THROW((void)moment(xs, 5), Error);
}

TEST(Volatility, SmallSeries) {
  EXPECT_DOUBLE_EQ(volatility(std::vector<double>{2, 4, 6}), 8.0 / 3.0);
  EXPECT_EQ(volatility(std::vector<double>(9, 3.25)), 0.0);
  EXPECT_DOUBLE_EQ(volatility(std::vector<double>{5, 7}), 1.0);
}

TEST(CrossCorrelation, SmallSeries) {
  EXPECT_DOUBLE_EQ(cross_correlation(std::vector<double>{12, 2}, std::vector<double>{3, 1}), 5.0);
  EXPECT_EQ(cross_correlation(std::vector<double>{1, 9, -3}, std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(cross_correlation(std::vector<double>{5, 7}, std::vector<double>{3, 1}), -1.0);
}

TEST(CrossCorrelation, LengthMismatchIsPairingError) {
  try {
    (void)cross_correlation(std::vector<double>{1, 2}, std::vector<double>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::pairing_mismatch);
  }
}

TEST(CoefficientOfVariation, SmallSeries) {
  EXPECT_DOUBLE_EQ(coefficient_of_variation_sq(std::vector<double>{2, 4, 6}), 1.0 / 6.0);
  EXPECT_EQ(coefficient_of_variation_sq(std::vector<double>(4, 2.0)), 0.0);
  EXPECT_DOUBLE_EQ(coefficient_of_variation_sq(std::vector<double>{5, 7}), 1.0 / 36.0);
  try {
    (void)coefficient_of_variation_sq(std::vector<double>{-1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined_cv);
  }
}

TEST(WindowMoments, EqualVolumes) {
  const WindowSeries w(WindowSpec(0.5, 1.0), std::vector<TradeTick>{{0.1, 10, 2}, {0.2, 6, 2}});
  const MomentSet m = window_moments(w);
  EXPECT_EQ(m.n_ticks, 2u);
  EXPECT_DOUBLE_EQ(m.value_moment(1), 8.0);
  EXPECT_DOUBLE_EQ(m.value_moment(2), 68.0);
  EXPECT_DOUBLE_EQ(m.volume_moment(1), 2.0);
  EXPECT_DOUBLE_EQ(m.volume_moment(2), 4.0);
  EXPECT_DOUBLE_EQ(m.cross_cu, 16.0);
  EXPECT_DOUBLE_EQ(m.value_volatility, 4.0);
  EXPECT_EQ(m.volume_volatility, 0.0);
  EXPECT_EQ(m.corr_cu, 0.0);
}

TEST(WindowMoments, SingleTick) {
  const WindowSeries w(WindowSpec(0.5, 1.0), std::vector<TradeTick>{{0.1, 5, 1}});
  const MomentSet m = window_moments(w);
  EXPECT_EQ(m.value_volatility, 0.0);
  EXPECT_EQ(m.volume_volatility, 0.0);
  EXPECT_EQ(m.corr_cu, 0.0);
}

TEST(WindowMoments, TwoTickExample) {
  const WindowSeries w(WindowSpec(0.5, 1.0), std::vector<TradeTick>{{0.1, 12, 3}, {0.2, 2, 1}});
  const MomentSet m = window_moments(w);
  EXPECT_DOUBLE_EQ(m.value_moment(1), 7.0);
  EXPECT_DOUBLE_EQ(m.value_moment(2), 74.0);
  EXPECT_DOUBLE_EQ(m.volume_moment(1), 2.0);
  EXPECT_DOUBLE_EQ(m.volume_moment(2), 5.0);
  EXPECT_DOUBLE_EQ(m.cross_cu, 19.0);
  EXPECT_DOUBLE_EQ(m.value_volatility, 25.0);
  EXPECT_DOUBLE_EQ(m.volume_volatility, 1.0);
  EXPECT_DOUBLE_EQ(m.corr_cu, 5.0);
}

TEST(WindowMoments, EmptyWindowRejected) {
  const WindowSeries w(WindowSpec(0.5, 1.0));
  EXPECT_THROW((void)window_moments(w), Error);
}

TEST(Properties, VolatilityMatchesRawMomentsAndIsNonNegative) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 400;
    const double loc = z(gen) * 10, sc = std::exp(z(gen));
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(loc + sc * z(gen));
    const auto acc = accumulate(xs);
    const double v = acc.volatility();
    EXPECT_GE(v, 0.0);
    const double raw = acc.raw_moment(2) - acc.raw_moment(1) * acc.raw_moment(1);
    EXPECT_NEAR(v, raw, 1e-10 * acc.raw_moment(2) + 1e-300);
    EXPECT_DOUBLE_EQ(cross_correlation(xs, xs), v);
  }
}

TEST(Properties, ShiftAndScaleEquivariance) {
  std::mt19937_64 gen(5);
  std::lognormal_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs, shifted, scaled;
    const double c = d(gen) * 100, k = d(gen);
    for (int i = 0; i < 250; ++i) {
      const double x = d(gen);
      xs.push_back(x);
      shifted.push_back(x + c);
      scaled.push_back(k * x);
    }
    const double v = volatility(xs);
    EXPECT_LT(rel_diff(volatility(shifted), v), 1e-9);
    EXPECT_LT(rel_diff(volatility(scaled), k * k * v), 1e-12);
    EXPECT_LT(rel_diff(mean(scaled), k * mean(xs)), 1e-14);
  }
}

TEST(Properties, ChiSquaredIsScaleInvariant) {
  const std::vector<double> xs{1.5, 2.5, 9.0, 0.25};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(x * 37.0);
  EXPECT_LT(rel_diff(coefficient_of_variation_sq(xs), coefficient_of_variation_sq(ys)), 1e-14);
}

TEST(Summation, TenMillionTicksMatchExtendedPrecision) {
  std::mt19937_64 gen(17);
  std::lognormal_distribution<double> d(4.0, 1.5);
  constexpr std::size_t n = 10'000'000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = d(gen);
  const auto oracle = tickbound::testing::long_stats(xs);
  const auto acc = accumulate(xs);
  EXPECT_LT(rel_diff(acc.mean(), static_cast<double>(oracle.mean)), 1e-9);
  EXPECT_LT(rel_diff(acc.volatility(), static_cast<double>(oracle.var)), 1e-9);
}

TEST(Summation, LargeOffsetDoesNotCancel) {
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(1e9 + (i % 2 == 0 ? 1.0 : -1.0));
  EXPECT_LT(rel_diff(volatility(xs), 1.0), 1e-9);
}
