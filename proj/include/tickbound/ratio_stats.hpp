#pragma once

// Shared machinery for market-based statistics of a ratio q_i = n_i / d_i
// (price = value / volume, return = value / past value) averaged with
// second-power weights d_i^2 / sum d^2. Price and return statistics are the
// same construction with a different denominator series.

#include <cmath>
#include <cstddef>
#include <optional>

#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/summation.hpp"

namespace tickbound::detail {

struct RatioTerm {
  double numerator;
  double weight;  // denominator of the ratio; enters squared as an averaging weight
  double ratio;
};

struct RatioStats {
  double mean = 0.0;           // sum n / sum d
  double second_moment = 0.0;  // volatility + mean^2
  double volatility = 0.0;     // sum (q - mean)^2 d^2 / sum d^2
  double weighted_m1 = 0.0;    // sum q d^2 / sum d^2
  double weighted_m2 = 0.0;    // sum q^2 d^2 / sum d^2
};

inline void require_weight_scale(double sum_w, double sum_w2, double sum_n2) {
  if (!(sum_w != 0.0) || !(sum_w2 > 0.0) || !std::isfinite(sum_w2)) {
    throw Error(ErrorCode::degenerate_window, "zero total weight");
  }
  if (sum_w2 < 1e-300 * sum_n2) {
    throw Error(ErrorCode::degenerate_window, "second weight moment is negligible against value scale");
  }
}

/// Explicit two-pass evaluation: mean first, then the weighted sum of squared
/// deviations from it.
template <class Range, class Proj>
[[nodiscard]] RatioStats ratio_stats_direct(const Range& range, Proj proj) {
  CompensatedSum sum_n, sum_w, sum_w2, sum_n2;
  std::size_t count = 0;
  for (const auto& item : range) {
    const RatioTerm t = proj(item);
    sum_n += t.numerator;
    sum_w += t.weight;
    sum_w2 += t.weight * t.weight;
    sum_n2 += t.numerator * t.numerator;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::empty_window, "empty window");
  require_weight_scale(sum_w.value(), sum_w2.value(), sum_n2.value());

  RatioStats s;
  s.mean = sum_n.value() / sum_w.value();
  const double w2 = sum_w2.value();
  CompensatedSum m1, m2, dev;
  for (const auto& item : range) {
    const RatioTerm t = proj(item);
    const double w = t.weight * t.weight / w2;
    m1 += t.ratio * w;
    m2 += t.ratio * t.ratio * w;
    const double d = t.ratio - s.mean;
    dev += d * d * w;
  }
  s.weighted_m1 = m1.value();
  s.weighted_m2 = m2.value();
  s.volatility = dev.value();
  s.second_moment = s.volatility + s.mean * s.mean;
  return s;
}

/// Closed form using only the frequency moments of numerator and denominator:
///   var = (Omega_n^2 + mean^2 Omega_d^2 - 2 mean cov[n,d]) / D(2)
[[nodiscard]] inline RatioStats ratio_stats_closed_form(const MomentSet& m) {
  if (m.n_ticks == 0) throw Error(ErrorCode::empty_window, "empty window");
  const double d1 = m.volume_moment(1);
  const double d2 = m.volume_moment(2);
  require_weight_scale(d1, d2, m.value_moment(2));
  RatioStats s;
  s.mean = m.value_moment(1) / d1;
  s.volatility = (m.value_volatility + s.mean * s.mean * m.volume_volatility - 2.0 * s.mean * m.corr_cu) / d2;
  s.second_moment = s.volatility + s.mean * s.mean;
  s.weighted_m1 = m.cross_cu / d2;
  s.weighted_m2 = m.value_moment(2) / d2;
  return s;
}

/// The closed-form second moment written directly in frequency moments:
///   (N(2) + 2 mean^2 Omega_d^2 - 2 mean cov[n,d]) / D(2)
[[nodiscard]] inline double ratio_second_moment_closed_form(const MomentSet& m) {
  const double d1 = m.volume_moment(1);
  const double d2 = m.volume_moment(2);
  require_weight_scale(d1, d2, m.value_moment(2));
  const double a = m.value_moment(1) / d1;
  return (m.value_moment(2) + 2.0 * a * a * m.volume_volatility - 2.0 * a * m.corr_cu) / d2;
}

/// Streaming form of both routes. Holds O(1) state per window.
///
/// The direct route here uses the expanded weighted form
///   var = q(2,2) - 2 q(1,2) mean + mean^2
/// evaluated about a shift (the first ratio) as [M2 - M1^2] + (M1 - (mean - shift))^2.
class RatioAccumulator {
 public:
  void add(double numerator, double weight, double ratio) noexcept {
    moments_.add(numerator, weight);
    if (moments_.count() == 1) shift_ = ratio;
    const double w = weight * weight;
    const double d = ratio - shift_;
    w_ += w;
    wd_ += w * d;
    wd2_ += w * d * d;
    wq_ += w * ratio;
    wq2_ += w * ratio * ratio;
    sum_n_ += numerator;
    sum_d_ += weight;
    sum_n2_ += numerator * numerator;
  }

  [[nodiscard]] std::size_t count() const noexcept { return moments_.count(); }
  [[nodiscard]] MomentSet moments() const { return moments_.moments(); }

  [[nodiscard]] RatioStats closed_form() const { return ratio_stats_closed_form(moments()); }

  [[nodiscard]] RatioStats direct() const {
    if (count() == 0) throw Error(ErrorCode::empty_window, "empty window");
    require_weight_scale(sum_d_.value(), w_.value(), sum_n2_.value());
    const double w = w_.value();
    RatioStats s;
    s.mean = sum_n_.value() / sum_d_.value();
    const double m1 = wd_.value() / w;
    const double m2 = wd2_.value() / w;
    const double offset = m1 - (s.mean - shift_);
    s.volatility = (m2 - m1 * m1) + offset * offset;
    s.second_moment = s.volatility + s.mean * s.mean;
    s.weighted_m1 = wq_.value() / w;
    s.weighted_m2 = wq2_.value() / w;
    return s;
  }

 private:
  PairMomentAccumulator moments_;
  double shift_ = 0.0;
  CompensatedSum w_, wd_, wd2_, wq_, wq2_, sum_n_, sum_d_, sum_n2_;
};

[[nodiscard]] inline std::optional<double> cv_sq_of(double volatility, double mean) {
  if (mean == 0.0) return std::nullopt;
  return volatility / (mean * mean);
}

}  // namespace tickbound::detail
