#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tickbound/error.hpp"

namespace tickbound {

/// One market deal: traded value C(t) in currency and volume U(t) in asset units.
struct TradeTick {
  double time = 0.0;
  double value = 0.0;
  double volume = 0.0;

  friend bool operator==(const TradeTick&, const TradeTick&) = default;
};

inline void validate(const TradeTick& tick) {
  if (!std::isfinite(tick.time) || !std::isfinite(tick.value) || !std::isfinite(tick.volume)) {
    throw Error(ErrorCode::invalid_tick, "non-finite field");
  }
  if (!(tick.volume > 0.0)) {
    throw Error(ErrorCode::invalid_tick, "volume must be positive");
  }
}

/// Price p = C/U of one deal.
[[nodiscard]] inline double price_of(const TradeTick& tick) {
  if (!(tick.volume > 0.0)) {
    throw Error(ErrorCode::invalid_tick, "volume must be positive to define a price");
  }
  return tick.value / tick.volume;
}

/// Averaging interval of width Δ centered at t. Membership is half-open:
/// lo <= time < hi.
class WindowSpec {
 public:
  WindowSpec(double center, double width) : center_(center), width_(width) {
    check_width(width);
    lo_ = center - width / 2.0;
    hi_ = center + width / 2.0;
  }

  /// k-th tumbling window of a grid anchored at origin. Adjacent grid windows
  /// share their boundary bit-for-bit, so the grid tiles the line.
  [[nodiscard]] static WindowSpec grid(double origin, double width, long long k) {
    check_width(width);
    WindowSpec w;
    w.width_ = width;
    w.lo_ = origin + static_cast<double>(k) * width;
    w.hi_ = origin + static_cast<double>(k + 1) * width;
    w.center_ = origin + (static_cast<double>(k) + 0.5) * width;
    return w;
  }

  [[nodiscard]] double center() const noexcept { return center_; }
  [[nodiscard]] double width() const noexcept { return width_; }
  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] bool contains(double time) const noexcept { return lo_ <= time && time < hi_; }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;

 private:
  WindowSpec() = default;

  static void check_width(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
      throw Error(ErrorCode::domain, "window width must be positive and finite");
    }
  }

  double center_ = 0.0;
  double width_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// All ticks of one averaging window, in nondecreasing time order.
class WindowSeries {
 public:
  explicit WindowSeries(WindowSpec spec) : spec_(spec) {}

  WindowSeries(WindowSpec spec, std::vector<TradeTick> ticks) : spec_(spec) {
    ticks_.reserve(ticks.size());
    for (const auto& t : ticks) {
      push_back(t);
    }
  }

  void push_back(const TradeTick& tick) {
    validate(tick);
    if (!spec_.contains(tick.time)) {
      throw Error(ErrorCode::domain, "tick at t=" + std::to_string(tick.time) + " lies outside window");
    }
    if (!ticks_.empty() && tick.time < ticks_.back().time) {
      throw Error(ErrorCode::unsorted_input,
                  "tick " + std::to_string(ticks_.size()) + " is earlier than its predecessor");
    }
    ticks_.push_back(tick);
  }

  [[nodiscard]] const WindowSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::span<const TradeTick> ticks() const noexcept { return ticks_; }
  [[nodiscard]] std::size_t size() const noexcept { return ticks_.size(); }
  [[nodiscard]] bool empty() const noexcept { return ticks_.empty(); }

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(ticks_.size());
    for (const auto& t : ticks_) out.push_back(t.value);
    return out;
  }

  [[nodiscard]] std::vector<double> volumes() const {
    std::vector<double> out;
    out.reserve(ticks_.size());
    for (const auto& t : ticks_) out.push_back(t.volume);
    return out;
  }

  [[nodiscard]] std::vector<double> prices() const {
    std::vector<double> out;
    out.reserve(ticks_.size());
    for (const auto& t : ticks_) out.push_back(price_of(t));
    return out;
  }

 private:
  WindowSpec spec_;
  std::vector<TradeTick> ticks_;
};

/// Index of the grid window holding `time`, consistent with WindowSpec::grid
/// bounds even when (time - origin) / width rounds across a boundary.
[[nodiscard]] inline long long window_index(double time, double width, double origin) {
  auto k = static_cast<long long>(std::floor((time - origin) / width));
  while (time < WindowSpec::grid(origin, width, k).lo()) --k;
  while (time >= WindowSpec::grid(origin, width, k).hi()) ++k;
  return k;
}

/// Throws unsorted_input naming the first index whose time precedes its predecessor.
inline void require_sorted(std::span<const TradeTick> ticks) {
  for (std::size_t i = 1; i < ticks.size(); ++i) {
    if (ticks[i].time < ticks[i - 1].time) {
      throw Error(ErrorCode::unsorted_input, "tick index " + std::to_string(i) +
                                                 " (t=" + std::to_string(ticks[i].time) +
                                                 ") precedes index " + std::to_string(i - 1));
    }
  }
}

/// Tumbling windows of `width` anchored at `origin`; empty windows are omitted.
[[nodiscard]] inline std::vector<WindowSeries> partition(std::span<const TradeTick> ticks,
                                                         double width, double origin = 0.0) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw Error(ErrorCode::domain, "window width must be positive and finite");
  }
  require_sorted(ticks);
  std::vector<WindowSeries> windows;
  long long current = 0;
  for (const auto& tick : ticks) {
    const long long k = window_index(tick.time, width, origin);
    if (windows.empty() || k != current) {
      windows.emplace_back(WindowSpec::grid(origin, width, k));
      current = k;
    }
    windows.back().push_back(tick);
  }
  return windows;
}

}  // namespace tickbound
