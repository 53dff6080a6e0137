#pragma once

// Market-based return statistics for a constant lag tau. Each deal's volume is
// revalued at the price tau earlier (its past market value C_o); returns are
// averaged with C_o weights for the mean and C_o^2 weights for the volatility,
// the same construction as price with C_o in place of volume.

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/ratio_stats.hpp"
#include "tickbound/summation.hpp"
#include "tickbound/trade_core.hpp"

namespace tickbound {

struct LaggedTick {
  TradeTick tick;
  double past_price = 0.0;  // p(t_i - tau)
  double past_value = 0.0;  // C_o = p(t_i - tau) U(t_i)
  double ret = 0.0;         // r = C / C_o = p(t_i) / p(t_i - tau)
};

[[nodiscard]] inline LaggedTick make_lagged(const TradeTick& tick, double past_price) {
  if (!(past_price > 0.0)) throw Error(ErrorCode::invalid_tick, "past price must be positive");
  LaggedTick l;
  l.tick = tick;
  l.past_price = past_price;
  l.past_value = past_price * tick.volume;
  l.ret = tick.value / l.past_value;
  return l;
}

/// Window ticks with resolved past prices, plus the count of ticks dropped
/// because no past price was available.
struct LaggedWindow {
  double lag = 0.0;
  std::vector<LaggedTick> ticks;
  std::size_t unresolved = 0;
};

struct ReturnStats {
  double mean = 0.0;            // h(1, tau)
  double second_moment = 0.0;   // h(2, tau)
  double volatility = 0.0;      // sigma_r^2(tau)
  std::optional<double> cv_sq;  // chi_r^2(tau); empty when h(1, tau) == 0
  double lag = 0.0;
};

namespace detail {

inline ReturnStats to_return_stats(const RatioStats& s, double lag) {
  ReturnStats r;
  r.mean = s.mean;
  r.second_moment = s.second_moment;
  r.volatility = s.volatility;
  r.cv_sq = cv_sq_of(s.volatility, s.mean);
  r.lag = lag;
  return r;
}

inline RatioTerm return_term(const LaggedTick& l) { return {l.tick.value, l.past_value, l.ret}; }

inline void require_lag(double lag) {
  if (!(lag > 0.0) || !std::isfinite(lag)) throw Error(ErrorCode::domain, "lag must be positive and finite");
}

inline void require_resolved(const LaggedWindow& lagged) {
  if (lagged.ticks.empty()) {
    throw Error(ErrorCode::empty_lagged_window,
                "no tick has a past price (" + std::to_string(lagged.unresolved) + " unresolved)");
  }
}

}  // namespace detail

/// Resolves p(t_i - tau) as the price of the most recent history tick with
/// time <= t_i - tau. Ticks without one are dropped and counted; a past price
/// that is not strictly positive also counts as unresolved.
[[nodiscard]] inline LaggedWindow build_lagged(const WindowSeries& window, std::span<const TradeTick> history,
                                               double lag) {
  detail::require_lag(lag);
  require_sorted(history);
  LaggedWindow out;
  out.lag = lag;
  out.ticks.reserve(window.size());
  for (const auto& tick : window.ticks()) {
    const double cutoff = tick.time - lag;
    auto it = std::upper_bound(history.begin(), history.end(), cutoff,
                               [](double t, const TradeTick& h) { return t < h.time; });
    if (it == history.begin()) {
      ++out.unresolved;
      continue;
    }
    const double past = price_of(*std::prev(it));
    if (!(past > 0.0)) {
      ++out.unresolved;
      continue;
    }
    out.ticks.push_back(make_lagged(tick, past));
  }
  detail::require_resolved(out);
  return out;
}

/// Moments of values C and past values C_o (the latter in the volume slot).
[[nodiscard]] inline MomentSet lagged_moments(const LaggedWindow& lagged) {
  detail::require_resolved(lagged);
  PairMomentAccumulator acc;
  for (const auto& l : lagged.ticks) acc.add(l.tick.value, l.past_value);
  return acc.moments();
}

/// h(1, tau) = sum C / sum C_o.
[[nodiscard]] inline double mean_return(const LaggedWindow& lagged) {
  detail::require_resolved(lagged);
  CompensatedSum c, co;
  for (const auto& l : lagged.ticks) {
    c += l.tick.value;
    co += l.past_value;
  }
  if (!(co.value() > 0.0)) throw Error(ErrorCode::degenerate_window, "zero total past value");
  return c.value() / co.value();
}

[[nodiscard]] inline ReturnStats return_stats_direct(const LaggedWindow& lagged) {
  detail::require_resolved(lagged);
  return detail::to_return_stats(detail::ratio_stats_direct(lagged.ticks, detail::return_term), lagged.lag);
}

[[nodiscard]] inline ReturnStats return_stats_closed_form(const LaggedWindow& lagged) {
  return detail::to_return_stats(detail::ratio_stats_closed_form(lagged_moments(lagged)), lagged.lag);
}

/// h(2, tau) from (C(2) + 2 h^2 Omega_Co^2 - 2 h corr[C C_o]) / C_o(2).
[[nodiscard]] inline double return_second_moment_closed_form(const LaggedWindow& lagged) {
  return detail::ratio_second_moment_closed_form(lagged_moments(lagged));
}

[[nodiscard]] inline double return_cv_sq(const ReturnStats& stats) {
  if (stats.mean == 0.0) throw Error(ErrorCode::undefined_cv, "mean return is zero");
  return stats.volatility / (stats.mean * stats.mean);
}

/// Streaming past-price lookup for a time-ordered stream. Retains only the
/// ticks inside the trailing lag interval.
class PastPriceTracker {
 public:
  explicit PastPriceTracker(double lag) : lag_(lag) { detail::require_lag(lag); }

  /// Past price for a tick at `time`; call before observe() for that tick.
  [[nodiscard]] std::optional<double> lookup(double time) {
    const double cutoff = time - lag_;
    while (!pending_.empty() && pending_.front().time <= cutoff) {
      resolved_ = pending_.front().price;
      pending_.pop_front();
    }
    return resolved_;
  }

  void observe(const TradeTick& tick) { pending_.push_back({tick.time, price_of(tick)}); }

  [[nodiscard]] double lag() const noexcept { return lag_; }

 private:
  struct Entry {
    double time;
    double price;
  };
  double lag_;
  std::deque<Entry> pending_;
  std::optional<double> resolved_;
};

/// Streaming return statistics for one window.
class ReturnAccumulator {
 public:
  explicit ReturnAccumulator(double lag) : lag_(lag) {}

  void add(const TradeTick& tick, std::optional<double> past_price) {
    if (!past_price || !(*past_price > 0.0)) {
      ++unresolved_;
      return;
    }
    const LaggedTick l = make_lagged(tick, *past_price);
    acc_.add(l.tick.value, l.past_value, l.ret);
  }

  [[nodiscard]] double lag() const noexcept { return lag_; }
  [[nodiscard]] std::size_t resolved() const noexcept { return acc_.count(); }
  [[nodiscard]] std::size_t unresolved() const noexcept { return unresolved_; }
  [[nodiscard]] MomentSet moments() const { return acc_.moments(); }
  [[nodiscard]] ReturnStats direct() const { return detail::to_return_stats(acc_.direct(), lag_); }
  [[nodiscard]] ReturnStats closed_form() const { return detail::to_return_stats(acc_.closed_form(), lag_); }

 private:
  double lag_;
  detail::RatioAccumulator acc_;
  std::size_t unresolved_ = 0;
};

}  // namespace tickbound
