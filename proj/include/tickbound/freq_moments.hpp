#pragma once

// Frequency-based (equal-weight, 1/N) moments of trade value and volume series.
//
// Central quantities are accumulated about a shift equal to the first sample,
// which removes the catastrophic cancellation of the naive C(2) - C(1)^2 form
// while keeping the estimator single-pass. All sums are compensated.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "tickbound/error.hpp"
#include "tickbound/summation.hpp"
#include "tickbound/trade_core.hpp"

namespace tickbound {

inline constexpr int kMaxMomentOrder = 4;

/// Single-pass accumulator for one real series.
class MomentAccumulator {
 public:
  void add(double x) noexcept {
    if (n_ == 0) shift_ = x;
    ++n_;
    const double x2 = x * x;
    raw_[0] += x;
    raw_[1] += x2;
    raw_[2] += x2 * x;
    raw_[3] += x2 * x2;
    const double d = x - shift_;
    d1_ += d;
    d2_ += d * d;
  }

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double shift() const noexcept { return shift_; }

  /// Compensated sums of (x - shift) and (x - shift)^2.
  [[nodiscard]] double shifted_sum() const noexcept { return d1_.value(); }
  [[nodiscard]] double shifted_sum_sq() const noexcept { return d2_.value(); }

  /// (1/N) sum x^order, order in 1..4.
  [[nodiscard]] double raw_moment(int order) const {
    require_nonempty();
    if (order < 1 || order > kMaxMomentOrder) {
      throw Error(ErrorCode::domain, "moment order must be in 1..4, got " + std::to_string(order));
    }
    return raw_[static_cast<std::size_t>(order - 1)].value() / static_cast<double>(n_);
  }

  /// Compensated sum of the series.
  [[nodiscard]] double sum() const noexcept { return raw_[0].value(); }

  [[nodiscard]] double mean() const {
    require_nonempty();
    return raw_[0].value() / static_cast<double>(n_);
  }

  /// Population variance: (1/N) sum (x - mean)^2.
  [[nodiscard]] double volatility() const {
    require_nonempty();
    // (N S2 - S1^2) / N^2 keeps integer-valued data exact up to the final division.
    const double n = static_cast<double>(n_);
    const double s1 = d1_.value();
    return std::max(0.0, (n * d2_.value() - s1 * s1) / (n * n));
  }

 private:
  void require_nonempty() const {
    if (n_ == 0) throw Error(ErrorCode::empty_window, "empty window");
  }

  std::size_t n_ = 0;
  double shift_ = 0.0;
  std::array<CompensatedSum, kMaxMomentOrder> raw_{};
  CompensatedSum d1_;
  CompensatedSum d2_;
};

/// Moments of one window: values C(t_i), volumes U(t_i) and their joint average.
/// For return analysis the "volume" slot carries past market values C_o(t_i, tau).
struct MomentSet {
  std::size_t n_ticks = 0;
  std::array<double, kMaxMomentOrder> value_moments{};   // C(1)..C(4)
  std::array<double, kMaxMomentOrder> volume_moments{};  // U(1)..U(4)
  double cross_cu = 0.0;                                 // E[C U]
  double value_volatility = 0.0;                         // Omega_C^2
  double volume_volatility = 0.0;                        // Omega_U^2
  double corr_cu = 0.0;                                  // E[C U] - C(1) U(1)

  [[nodiscard]] double value_moment(int order) const { return value_moments.at(static_cast<std::size_t>(order - 1)); }
  [[nodiscard]] double volume_moment(int order) const { return volume_moments.at(static_cast<std::size_t>(order - 1)); }
};

/// Single-pass accumulator over paired series (a_i, b_i).
class PairMomentAccumulator {
 public:
  void add(double a, double b) noexcept {
    if (a_.count() == 0) {
      shift_a_ = a;
      shift_b_ = b;
    }
    a_.add(a);
    b_.add(b);
    raw_ab_ += a * b;
    shifted_ab_ += (a - shift_a_) * (b - shift_b_);
  }

  [[nodiscard]] std::size_t count() const noexcept { return a_.count(); }
  [[nodiscard]] const MomentAccumulator& first() const noexcept { return a_; }
  [[nodiscard]] const MomentAccumulator& second() const noexcept { return b_; }

  /// (1/N) sum a_i b_i - mean(a) mean(b).
  [[nodiscard]] double covariance() const {
    if (count() == 0) throw Error(ErrorCode::empty_window, "empty window");
    const double n = static_cast<double>(count());
    return (n * shifted_ab_.value() - a_.shifted_sum() * b_.shifted_sum()) / (n * n);
  }

  [[nodiscard]] MomentSet moments() const {
    if (count() == 0) throw Error(ErrorCode::empty_window, "empty window");
    MomentSet m;
    m.n_ticks = count();
    for (int k = 1; k <= kMaxMomentOrder; ++k) {
      m.value_moments[static_cast<std::size_t>(k - 1)] = a_.raw_moment(k);
      m.volume_moments[static_cast<std::size_t>(k - 1)] = b_.raw_moment(k);
    }
    m.cross_cu = raw_ab_.value() / static_cast<double>(count());
    m.value_volatility = a_.volatility();
    m.volume_volatility = b_.volatility();
    m.corr_cu = covariance();
    return m;
  }

 private:
  MomentAccumulator a_;
  MomentAccumulator b_;
  double shift_a_ = 0.0;
  double shift_b_ = 0.0;
  CompensatedSum raw_ab_;
  CompensatedSum shifted_ab_;
};

[[nodiscard]] inline MomentAccumulator accumulate(std::span<const double> series) {
  MomentAccumulator acc;
  for (double x : series) acc.add(x);
  return acc;
}

/// (1/N) sum x_i^order.
[[nodiscard]] inline double moment(std::span<const double> series, int order) {
  return accumulate(series).raw_moment(order);
}

/// Population variance C(2) - C(1)^2.
[[nodiscard]] inline double volatility(std::span<const double> series) {
  return accumulate(series).volatility();
}

[[nodiscard]] inline double mean(std::span<const double> series) { return accumulate(series).mean(); }

/// (1/N) sum a_i b_i - mean(a) mean(b). The two series must be paired index by index.
[[nodiscard]] inline double cross_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::pairing_mismatch, "series lengths differ (" + std::to_string(a.size()) +
                                                 " vs " + std::to_string(b.size()) + ")");
  }
  PairMomentAccumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i], b[i]);
  return acc.covariance();
}

/// volatility / mean^2.
[[nodiscard]] inline double coefficient_of_variation_sq(std::span<const double> series) {
  const auto acc = accumulate(series);
  const double m = acc.mean();
  if (m == 0.0) throw Error(ErrorCode::undefined_cv, "series mean is zero");
  return acc.volatility() / (m * m);
}

[[nodiscard]] inline MomentSet pair_moments(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::pairing_mismatch, "series lengths differ");
  }
  PairMomentAccumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i], b[i]);
  return acc.moments();
}

[[nodiscard]] inline MomentSet window_moments(const WindowSeries& window) {
  PairMomentAccumulator acc;
  for (const auto& t : window.ticks()) acc.add(t.value, t.volume);
  return acc.moments();
}

}  // namespace tickbound
