#pragma once

// Market-based price statistics of one averaging window. The mean is VWAP;
// the volatility averages squared deviations from VWAP with weights
// w(t_i;2) = U^2(t_i) / sum U^2.
//
// Two independent routes are public: price_stats_direct sums the weighted
// deviations tick by tick, price_stats_closed_form uses only the frequency
// moments of values and volumes. They agree algebraically.

#include <optional>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/ratio_stats.hpp"
#include "tickbound/summation.hpp"
#include "tickbound/trade_core.hpp"

namespace tickbound {

struct PriceStats {
  double mean = 0.0;                  // a(1), VWAP
  double second_moment = 0.0;         // a(2)
  double volatility = 0.0;            // sigma_p^2
  std::optional<double> cv_sq;        // chi_p^2; empty when a(1) == 0
  double weighted_price_m1 = 0.0;     // p(1,2)
  double weighted_price_m2 = 0.0;     // p(2,2)
};

namespace detail {

inline PriceStats to_price_stats(const RatioStats& s) {
  PriceStats p;
  p.mean = s.mean;
  p.second_moment = s.second_moment;
  p.volatility = s.volatility;
  p.cv_sq = cv_sq_of(s.volatility, s.mean);
  p.weighted_price_m1 = s.weighted_m1;
  p.weighted_price_m2 = s.weighted_m2;
  return p;
}

inline RatioTerm price_term(const TradeTick& t) { return {t.value, t.volume, price_of(t)}; }

}  // namespace detail

/// Volume weighted average price: sum C / sum U.
[[nodiscard]] inline double vwap(const WindowSeries& window) {
  if (window.empty()) throw Error(ErrorCode::empty_window, "empty window");
  CompensatedSum c, u;
  for (const auto& t : window.ticks()) {
    c += t.value;
    u += t.volume;
  }
  if (!(u.value() > 0.0)) throw Error(ErrorCode::degenerate_window, "zero total volume");
  return c.value() / u.value();
}

/// w_i = U_i^2 / sum U^2.
[[nodiscard]] inline std::vector<double> weights_order2(const WindowSeries& window) {
  if (window.empty()) throw Error(ErrorCode::empty_window, "empty window");
  CompensatedSum total;
  for (const auto& t : window.ticks()) total += t.volume * t.volume;
  std::vector<double> w;
  w.reserve(window.size());
  for (const auto& t : window.ticks()) w.push_back(t.volume * t.volume / total.value());
  return w;
}

[[nodiscard]] inline PriceStats price_stats_direct(const WindowSeries& window) {
  return detail::to_price_stats(detail::ratio_stats_direct(window.ticks(), detail::price_term));
}

[[nodiscard]] inline PriceStats price_stats_closed_form(const MomentSet& moments) {
  return detail::to_price_stats(detail::ratio_stats_closed_form(moments));
}

/// a(2) evaluated directly from (C(2) + 2 a^2 Omega_U^2 - 2 a corr[CU]) / U(2).
[[nodiscard]] inline double price_second_moment_closed_form(const MomentSet& moments) {
  return detail::ratio_second_moment_closed_form(moments);
}

/// chi_p^2 = sigma_p^2 / a(1)^2.
[[nodiscard]] inline double price_cv_sq(const PriceStats& stats) {
  if (stats.mean == 0.0) throw Error(ErrorCode::undefined_cv, "price mean is zero");
  return stats.volatility / (stats.mean * stats.mean);
}

/// Streaming accumulator producing both routes without retaining ticks.
class PriceAccumulator {
 public:
  void add(const TradeTick& t) { acc_.add(t.value, t.volume, price_of(t)); }

  [[nodiscard]] std::size_t count() const noexcept { return acc_.count(); }
  [[nodiscard]] MomentSet moments() const { return acc_.moments(); }
  [[nodiscard]] PriceStats direct() const { return detail::to_price_stats(acc_.direct()); }
  [[nodiscard]] PriceStats closed_form() const { return detail::to_price_stats(acc_.closed_form()); }

 private:
  detail::RatioAccumulator acc_;
};

}  // namespace tickbound
