#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "test_support.hpp"
#include "tickbound/market_price.hpp"
#include "tickbound/market_return.hpp"

using namespace tickbound;
using tickbound::testing::rel_diff;

namespace {

// Lagged set with given (value, past_value) pairs; volume 1 so past_price = past_value.
LaggedWindow lagged_of(const std::vector<std::pair<double, double>>& pairs, double lag = 1.0) {
  LaggedWindow out;
  out.lag = lag;
  double t = 0.0;
  for (const auto& [c, co] : pairs) out.ticks.push_back(make_lagged({t += 0.01, c, 1.0}, co));
  return out;
}

// Random stream and, for its last unit window, the lagged set by brute-force scan.
struct Scenario {
  std::vector<TradeTick> history;
  WindowSeries window{WindowSpec(9.5, 1.0)};
};

Scenario random_scenario(std::mt19937_64& gen, std::size_t n, double rho) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> gap(0.0, 2.0 / static_cast<double>(n));
  Scenario s;
  double t = 0.0;
  while (t < 10.0) {
    const double z1 = z(gen);
    const double z2 = rho * z1 + std::sqrt(1 - rho * rho) * z(gen);
    const TradeTick tick{t, std::exp(1.0 + 0.6 * z1), std::exp(0.8 * z2)};
    s.history.push_back(tick);
    if (s.window.spec().contains(t)) s.window.push_back(tick);
    t += gap(gen) * 10.0;
  }
  return s;
}

}  // namespace

TEST(MakeLagged, ValueEqualsReturnTimesPastValue) {
  const LaggedTick l = make_lagged({10, 8, 2}, 2);
  EXPECT_EQ(l.ret, 2.0);
  EXPECT_EQ(l.past_value, 4.0);
  EXPECT_EQ(l.ret * l.past_value, l.tick.value);
  EXPECT_THROW((void)make_lagged({10, 8, 2}, 0.0), Error);
}

TEST(BuildLagged, SingleHistoryTick) {
  const std::vector<TradeTick> history{{4, 2, 1}, {10, 8, 2}};
  const WindowSeries w(WindowSpec(10.5, 1.0), std::vector<TradeTick>{{10, 8, 2}});
  const LaggedWindow l = build_lagged(w, history, 5.0);
  ASSERT_EQ(l.ticks.size(), 1u);
  EXPECT_EQ(l.ticks[0].ret, 2.0);
  EXPECT_EQ(l.ticks[0].past_value, 2.0 * 2.0);
  EXPECT_EQ(l.unresolved, 0u);
}

TEST(BuildLagged, LagBeyondHistoryIsEmpty) {
  const std::vector<TradeTick> history{{4, 2, 1}, {10, 8, 2}};
  const WindowSeries w(WindowSpec(10.5, 1.0), std::vector<TradeTick>{{10, 8, 2}});
  try {
    (void)build_lagged(w, history, 100.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_lagged_window);
    EXPECT_TRUE(e.is_degeneracy());
  }
}

TEST(BuildLagged, LatestTickAtOrBeforeCutoff) {
  const std::vector<TradeTick> history{{3, 1, 1}, {4.5, 2, 1}, {5.5, 4, 1}, {10, 8, 2}};
  const WindowSeries w(WindowSpec(10.5, 1.0), std::vector<TradeTick>{{10, 8, 2}});
  const LaggedWindow l = build_lagged(w, history, 5.0);
  ASSERT_EQ(l.ticks.size(), 1u);
  EXPECT_EQ(l.ticks[0].past_price, 2.0);

  const std::vector<TradeTick> sparse{{3, 1, 1}, {5.5, 4, 1}, {10, 8, 2}};
  EXPECT_EQ(build_lagged(w, sparse, 5.0).ticks[0].past_price, 1.0);
  // Exactly at the cutoff counts as "at or before".
  const std::vector<TradeTick> exact{{3, 1, 1}, {5, 3, 1}, {10, 8, 2}};
  EXPECT_EQ(build_lagged(w, exact, 5.0).ticks[0].past_price, 3.0);
}

TEST(BuildLagged, CountsUnresolvedTicks) {
  const std::vector<TradeTick> history{{1, 1, 1}, {2, 1, 1}, {3, 1, 1}};
  const WindowSeries w(WindowSpec(2.5, 2.0), std::vector<TradeTick>{{2, 1, 1}, {3, 1, 1}});
  const LaggedWindow l = build_lagged(w, history, 1.5);
  EXPECT_EQ(l.ticks.size(), 1u);
  EXPECT_EQ(l.unresolved, 1u);
}

TEST(MeanReturn, Examples) {
  EXPECT_DOUBLE_EQ(mean_return(lagged_of({{12, 6}, {2, 1}})), 2.0);
  EXPECT_DOUBLE_EQ(mean_return(lagged_of({{12, 6}, {2, 0.5}})), 14.0 / 6.5);
  EXPECT_DOUBLE_EQ(mean_return(lagged_of({{7, 2}})), 3.5);
}

TEST(ReturnStatsDirect, Examples) {
  const ReturnStats constant = return_stats_direct(lagged_of({{6, 3}, {2, 1}, {10, 5}}));
  EXPECT_EQ(constant.volatility, 0.0);
  EXPECT_DOUBLE_EQ(constant.second_moment, 4.0);

  const ReturnStats s = return_stats_direct(lagged_of({{6, 3}, {4, 1}}, 2.0));
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.volatility, 0.45, 1e-15);
  EXPECT_EQ(s.lag, 2.0);

  EXPECT_EQ(return_stats_direct(lagged_of({{6, 3}})).volatility, 0.0);
}

TEST(ReturnStatsClosedForm, Examples) {
  const LaggedWindow l = lagged_of({{6, 3}, {4, 1}});
  const MomentSet m = lagged_moments(l);
  EXPECT_DOUBLE_EQ(m.value_moment(1), 5.0);
  EXPECT_DOUBLE_EQ(m.volume_moment(1), 2.0);
  EXPECT_DOUBLE_EQ(m.value_moment(2), 26.0);
  EXPECT_DOUBLE_EQ(m.volume_moment(2), 5.0);
  EXPECT_DOUBLE_EQ(m.cross_cu, 11.0);
  EXPECT_DOUBLE_EQ(m.value_volatility, 1.0);
  EXPECT_DOUBLE_EQ(m.volume_volatility, 1.0);
  EXPECT_DOUBLE_EQ(m.corr_cu, 1.0);
  EXPECT_NEAR(return_stats_closed_form(l).volatility, 0.45, 1e-15);
  EXPECT_EQ(return_stats_closed_form(lagged_of({{6, 3}, {2, 1}})).volatility, 0.0);
}

TEST(ReturnCvSq, Examples) {
  ReturnStats s;
  s.mean = 2.5;
  s.volatility = 0.45;
  EXPECT_DOUBLE_EQ(return_cv_sq(s), 0.072);
  s.volatility = 0;
  EXPECT_EQ(return_cv_sq(s), 0.0);
  s.mean = 0;
  EXPECT_THROW((void)return_cv_sq(s), Error);
}

TEST(Properties, ClosedFormMatchesDirect) {
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 300; ++trial) {
    const double rho = (trial % 3 - 1) * 0.8;
    const auto sc = random_scenario(gen, 2 + gen() % 300, rho);
    if (sc.window.size() < 2) continue;
    const LaggedWindow l = build_lagged(sc.window, sc.history, 0.37 + 0.1 * (trial % 7));
    const ReturnStats d = return_stats_direct(l);
    const ReturnStats c = return_stats_closed_form(l);
    EXPECT_LT(rel_diff(d.volatility, c.volatility), 1e-9);
    EXPECT_LT(rel_diff(d.second_moment, return_second_moment_closed_form(l)), 1e-9);
    for (const auto& t : l.ticks) EXPECT_EQ(t.past_value, t.past_price * t.tick.volume);
  }
}

TEST(Properties, CvIdentity) {
  std::mt19937_64 gen(72);
  for (int trial = 0; trial < 300; ++trial) {
    const auto sc = random_scenario(gen, 2 + gen() % 300, (trial % 3 - 1) * 0.8);
    if (sc.window.size() < 2) continue;
    const LaggedWindow l = build_lagged(sc.window, sc.history, 0.5);
    const MomentSet m = lagged_moments(l);
    const double c1 = m.value_moment(1), o1 = m.volume_moment(1);
    const double chi_c = m.value_volatility / (c1 * c1);
    const double chi_o = m.volume_volatility / (o1 * o1);
    const double lhs = return_cv_sq(return_stats_direct(l)) * (1 + chi_o);
    const double cross = 2 * m.corr_cu / (c1 * o1);
    EXPECT_LT(std::abs(lhs - (chi_c + chi_o - cross)), 1e-9 * (chi_c + chi_o + std::abs(cross)));
  }
}

TEST(Properties, UnitPastPriceReproducesPriceStatistics) {
  std::mt19937_64 gen(73);
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = tickbound::testing::random_window(gen, 1 + gen() % 300, (trial % 3 - 1) * 0.8);
    LaggedWindow l;
    for (const auto& t : w.ticks()) l.ticks.push_back(make_lagged(t, 1.0));
    const ReturnStats r = return_stats_direct(l);
    const PriceStats p = price_stats_direct(w);
    EXPECT_EQ(r.mean, p.mean);
    EXPECT_EQ(r.volatility, p.volatility);
    EXPECT_EQ(r.second_moment, p.second_moment);
    const ReturnStats rc = return_stats_closed_form(l);
    const PriceStats pc = price_stats_closed_form(window_moments(w));
    EXPECT_EQ(rc.volatility, pc.volatility);
    EXPECT_EQ(rc.mean, pc.mean);
  }
}

TEST(Properties, StreamingTrackerMatchesBatchLookup) {
  std::mt19937_64 gen(74);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sc = random_scenario(gen, 50 + gen() % 300, 0.0);
    if (sc.window.size() < 2) continue;
    const double lag = 0.25 + 0.2 * (trial % 5);
    PastPriceTracker tracker(lag);
    ReturnAccumulator acc(lag);
    for (const auto& t : sc.history) {
      const auto past = tracker.lookup(t.time);
      tracker.observe(t);
      if (sc.window.spec().contains(t.time)) acc.add(t, past);
    }
    const LaggedWindow l = build_lagged(sc.window, sc.history, lag);
    EXPECT_EQ(acc.resolved(), l.ticks.size());
    EXPECT_EQ(acc.unresolved(), l.unresolved);
    EXPECT_LT(rel_diff(acc.direct().volatility, return_stats_direct(l).volatility), 1e-9);
    EXPECT_LT(rel_diff(acc.closed_form().mean, return_stats_direct(l).mean), 1e-13);
  }
}
