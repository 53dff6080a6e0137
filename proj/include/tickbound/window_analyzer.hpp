#pragma once

// Streaming per-window analysis of a time-ordered tick stream. Each window
// keeps O(1) accumulator state (plus its prices when gap metrics are
// requested); past prices for returns come from a trailing buffer spanning
// one lag.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/gauss_limit.hpp"
#include "tickbound/market_price.hpp"
#include "tickbound/market_return.hpp"
#include "tickbound/report.hpp"
#include "tickbound/trade_core.hpp"

namespace tickbound {

struct AnalyzeOptions {
  double width = 1.0;
  double origin = 0.0;
  std::optional<double> lag;
  bool gap_metrics = false;
};

/// Accumulated state of one window, ready to be finalized (possibly on
/// another thread).
struct WindowState {
  WindowSpec spec;
  PriceAccumulator price;
  std::optional<ReturnAccumulator> returns;
  std::vector<double> prices;  // retained only for gap metrics
};

struct WindowOutcome {
  AnalysisReport report;
  bool degenerate = false;  // zero-mean CV or empty lagged window
};

[[nodiscard]] inline WindowOutcome finalize(const WindowState& w) {
  WindowOutcome out;
  auto& r = out.report;
  r.command = "analyze";
  r.window = w.spec;
  r.moments = w.price.moments();
  r.price = PriceSection{w.price.direct(), w.price.closed_form()};
  const auto& p = r.price->direct;
  r.gaussians.emplace("price", gaussian_with_floor(p.mean, p.volatility, p.second_moment));
  if (!p.cv_sq) {
    out.degenerate = true;
    r.warnings.push_back("price mean is zero; coefficient of variation undefined");
  }
  if (w.returns) {
    ReturnSection s;
    s.lag = w.returns->lag();
    s.resolved = w.returns->resolved();
    s.unresolved = w.returns->unresolved();
    if (s.resolved > 0) {
      s.moments = w.returns->moments();
      s.direct = w.returns->direct();
      s.closed_form = w.returns->closed_form();
      r.gaussians.emplace("return", gaussian_with_floor(s.direct->mean, s.direct->volatility, s.direct->second_moment));
      if (!s.direct->cv_sq) {
        out.degenerate = true;
        r.warnings.push_back("mean return is zero; coefficient of variation undefined");
      }
    } else {
      out.degenerate = true;
    }
    if (s.unresolved > 0) {
      r.warnings.push_back(std::to_string(s.unresolved) + " tick(s) without a past price at this lag");
    }
    r.returns = s;
  }
  if (!w.prices.empty()) {
    if (w.prices.size() >= 2) {
      r.gaps.emplace("price", gaussian_gap(w.prices, r.gaussians.at("price")));
    } else {
      r.warnings.push_back("gap metrics need at least 2 ticks");
    }
  }
  return out;
}

class WindowAnalyzer {
 public:
  explicit WindowAnalyzer(AnalyzeOptions opts) : opts_(opts) {
    // Validates width.
    (void)WindowSpec::grid(opts_.origin, opts_.width, 0);
    if (opts_.lag) tracker_.emplace(*opts_.lag);
  }

  /// Feeds one tick. Returns the previous window when this tick opens a new one.
  [[nodiscard]] std::optional<WindowState> push(const TradeTick& tick) {
    validate(tick);
    if (seen_ > 0 && tick.time < last_time_) {
      throw Error(ErrorCode::unsorted_input, "tick index " + std::to_string(seen_) + " (t=" + std::to_string(tick.time) +
                                                 ") precedes its predecessor");
    }
    last_time_ = tick.time;
    ++seen_;

    std::optional<WindowState> closed;
    const long long k = window_index(tick.time, opts_.width, opts_.origin);
    if (!current_ || k != index_) {
      if (current_) closed = std::exchange(current_, std::nullopt);
      current_.emplace(WindowState{WindowSpec::grid(opts_.origin, opts_.width, k), {}, std::nullopt, {}});
      if (opts_.lag) current_->returns.emplace(*opts_.lag);
      index_ = k;
    }
    current_->price.add(tick);
    if (opts_.gap_metrics) current_->prices.push_back(price_of(tick));
    if (tracker_) {
      current_->returns->add(tick, tracker_->lookup(tick.time));
      tracker_->observe(tick);
    }
    return closed;
  }

  /// Closes the last open window, if any.
  [[nodiscard]] std::optional<WindowState> finish() { return std::exchange(current_, std::nullopt); }

  [[nodiscard]] std::size_t ticks_seen() const noexcept { return seen_; }

 private:
  AnalyzeOptions opts_;
  std::optional<PastPriceTracker> tracker_;
  std::optional<WindowState> current_;
  long long index_ = 0;
  std::size_t seen_ = 0;
  double last_time_ = 0.0;
};

}  // namespace tickbound
