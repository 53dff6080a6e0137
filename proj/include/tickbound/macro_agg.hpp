#pragma once

// Aggregate ("macroeconomic") variable built from a pool of deals made by many
// agents during one window. Each deal value C is scaled to x = K C, where K is
// the number of deals, so that E[x] equals the pool total. The uncertainty of
// the aggregate is then the variance of x, and its squared coefficient of
// variation coincides with that of the individual deal values.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/summation.hpp"
#include "tickbound/trade_core.hpp"

namespace tickbound {

struct Deal {
  std::string agent_id;  // lineage only; the estimators flatten over agents
  double time = 0.0;
  double value = 0.0;

  friend bool operator==(const Deal&, const Deal&) = default;
};

class DealPool {
 public:
  DealPool(std::vector<Deal> deals, WindowSpec window) : deals_(std::move(deals)), window_(window) {
    for (std::size_t i = 0; i < deals_.size(); ++i) {
      const auto& d = deals_[i];
      if (!std::isfinite(d.value) || !std::isfinite(d.time)) {
        throw Error(ErrorCode::invalid_tick, "deal " + std::to_string(i) + " has a non-finite field");
      }
      if (!window_.contains(d.time)) {
        throw Error(ErrorCode::domain, "deal " + std::to_string(i) + " lies outside the window");
      }
    }
  }

  [[nodiscard]] const std::vector<Deal>& deals() const noexcept { return deals_; }
  [[nodiscard]] const WindowSpec& window() const noexcept { return window_; }
  [[nodiscard]] std::size_t size() const noexcept { return deals_.size(); }

 private:
  std::vector<Deal> deals_;
  WindowSpec window_;
};

struct AggregateStats {
  std::size_t k = 0;
  double deal_mean = 0.0;            // C(1)
  double deal_second = 0.0;          // C(2)
  double deal_volatility = 0.0;      // sigma_C^2
  double total = 0.0;                // C_Delta(1) = K C(1)
  double total_second = 0.0;         // C_Delta(2) = K C(2)
  double agg_mean = 0.0;             // x(1)
  double agg_second = 0.0;           // E[x^2] = K C_Delta(2)
  double agg_volatility = 0.0;       // sigma_x^2 = K^2 sigma_C^2
  std::optional<double> agg_cv_sq;   // chi_x^2
  std::optional<double> deal_cv_sq;  // chi_C^2
};

[[nodiscard]] inline AggregateStats aggregate(const DealPool& pool) {
  if (pool.size() == 0) throw Error(ErrorCode::empty_window, "empty deal pool");
  const std::size_t k = pool.size();
  const double kd = static_cast<double>(k);

  MomentAccumulator deals;
  for (const auto& d : pool.deals()) deals.add(d.value);
  // The aggregate random variable x = K C, accumulated on its own.
  MomentAccumulator scaled;
  for (const auto& d : pool.deals()) scaled.add(kd * d.value);

  AggregateStats s;
  s.k = k;
  s.deal_mean = deals.mean();
  s.deal_second = deals.raw_moment(2);
  s.deal_volatility = deals.volatility();
  s.total = deals.sum();
  s.total_second = s.deal_second * kd;
  s.agg_mean = scaled.mean();
  s.agg_second = scaled.raw_moment(2);
  s.agg_volatility = scaled.volatility();
  if (s.agg_mean != 0.0) s.agg_cv_sq = s.agg_volatility / (s.agg_mean * s.agg_mean);
  if (s.deal_mean != 0.0) s.deal_cv_sq = s.deal_volatility / (s.deal_mean * s.deal_mean);
  return s;
}

struct CvTransfer {
  double agg_cv_sq = 0.0;
  double deal_cv_sq = 0.0;
  double gap = 0.0;  // |agg_cv_sq - deal_cv_sq|
};

/// Both squared coefficients of variation and their absolute difference.
[[nodiscard]] inline CvTransfer cv_transfer_check(const DealPool& pool) {
  const auto s = aggregate(pool);
  if (!s.agg_cv_sq || !s.deal_cv_sq) throw Error(ErrorCode::undefined_cv, "deal pool mean is zero");
  return {*s.agg_cv_sq, *s.deal_cv_sq, std::abs(*s.agg_cv_sq - *s.deal_cv_sq)};
}

}  // namespace tickbound
