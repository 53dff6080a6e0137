#pragma once

// Two-moment Gaussian approximation of a random variable and measures of how
// far an empirical sample departs from it. A Gaussian carries only the mean
// and the variance; its third central moment is 0 and its fourth is
// 3 variance^2, so skewness and excess kurtosis of the data quantify what a
// two-moment forecast discards.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/summation.hpp"

namespace tickbound {

struct GaussianApprox {
  double mean = 0.0;
  double variance = 0.0;  // 0 is a point mass at mean

  [[nodiscard]] bool degenerate() const noexcept { return variance == 0.0; }
  [[nodiscard]] double stddev() const noexcept { return std::sqrt(variance); }
};

[[nodiscard]] inline GaussianApprox gaussian_from_stats(double mean, double volatility) {
  if (!std::isfinite(mean) || !std::isfinite(volatility)) {
    throw Error(ErrorCode::invalid_stats, "non-finite moments");
  }
  if (volatility < 0.0) throw Error(ErrorCode::invalid_stats, "negative volatility");
  return {mean, volatility};
}

/// Central moment of the approximation: 0 (odd), variance (2), 3 variance^2 (4).
[[nodiscard]] inline double central_moment(const GaussianApprox& g, int order) {
  if (order < 1 || order > 4) throw Error(ErrorCode::domain, "central moment order must be in 1..4");
  switch (order) {
    case 2: return g.variance;
    case 4: return 3.0 * g.variance * g.variance;
    default: return 0.0;
  }
}

[[nodiscard]] inline double standard_normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Inverse of the standard normal CDF on (0, 1). Rational initial guess
/// (Acklam) refined by one Halley step against erfc.
[[nodiscard]] inline double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::domain, "probability must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement on F(x) - p, with F taken from the nearer tail.
  const double err = x < 0.0 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

[[nodiscard]] inline double pdf(const GaussianApprox& g, double x) {
  if (g.degenerate()) return x == g.mean ? std::numeric_limits<double>::infinity() : 0.0;
  const double z = (x - g.mean) / g.stddev();
  return std::exp(-0.5 * z * z) / (g.stddev() * std::sqrt(2.0 * std::numbers::pi));
}

[[nodiscard]] inline double cdf(const GaussianApprox& g, double x) {
  if (g.degenerate()) return x < g.mean ? 0.0 : 1.0;
  return standard_normal_cdf((x - g.mean) / g.stddev());
}

[[nodiscard]] inline double quantile(const GaussianApprox& g, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::domain, "probability must lie in (0, 1)");
  if (g.degenerate()) return g.mean;
  return g.mean + g.stddev() * standard_normal_quantile(p);
}

struct GapResult {
  double ks_statistic = 0.0;
  double excess_skewness = 0.0;  // sample skewness; the Gaussian's is 0
  double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
  bool infinite = false;         // degenerate Gaussian against non-constant data
};

/// Kolmogorov-Smirnov distance of the samples from g, plus the third and
/// fourth standardized moments the Gaussian cannot represent. Constant
/// samples report zero skewness and kurtosis by convention.
[[nodiscard]] inline GapResult gaussian_gap(std::span<const double> samples, const GaussianApprox& g) {
  if (samples.size() < 2) throw Error(ErrorCode::domain, "gaussian_gap needs at least 2 samples");

  CompensatedSum s1;
  for (double x : samples) s1 += x;
  const double n = static_cast<double>(samples.size());
  const double m = s1.value() / n;
  CompensatedSum c2, c3, c4;
  for (double x : samples) {
    const double d = x - m;
    const double d2 = d * d;
    c2 += d2;
    c3 += d2 * d;
    c4 += d2 * d2;
  }
  const double m2 = c2.value() / n;
  const bool constant = std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples[0]; });

  GapResult r;
  if (g.degenerate() && !constant) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, inf, true};
  }
  if (!constant && m2 > 0.0) {
    r.excess_skewness = (c3.value() / n) / std::pow(m2, 1.5);
    r.excess_kurtosis = (c4.value() / n) / (m2 * m2) - 3.0;
  }

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  // Supremum over x of |F_n(x) - F(x)|, evaluated on each run of equal values
  // just below the run (left limit) and at the run.
  double d = 0.0;
  for (std::size_t start = 0; start < sorted.size();) {
    std::size_t end = start;
    while (end + 1 < sorted.size() && sorted[end + 1] == sorted[start]) ++end;
    const double v = sorted[start];
    const double left = g.degenerate() ? (v <= g.mean ? 0.0 : 1.0) : cdf(g, v);
    const double at = cdf(g, v);
    d = std::max({d, std::abs(left - static_cast<double>(start) / n),
                  std::abs(at - static_cast<double>(end + 1) / n)});
    start = end + 1;
  }
  r.ks_statistic = d;
  return r;
}

}  // namespace tickbound
