#pragma once

// Reproducible synthetic trade streams. Value and volume marginals are joined
// by a Gaussian copula whose latent correlation is solved so that the
// Pearson correlation of (value, volume) hits the requested target.

#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/gauss_limit.hpp"
#include "tickbound/macro_agg.hpp"
#include "tickbound/rng.hpp"
#include "tickbound/trade_core.hpp"

namespace tickbound {

enum class Family { lognormal, gamma, constant };

[[nodiscard]] inline std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::lognormal: return "lognormal";
    case Family::gamma: return "gamma";
    case Family::constant: return "constant";
  }
  return "?";
}

/// A positive marginal distribution. Parameters: lognormal (mu, sigma) of the
/// underlying normal; gamma (shape, scale); constant (value).
class Marginal {
 public:
  [[nodiscard]] static Marginal lognormal(double mu, double sigma) {
    if (!std::isfinite(mu) || !(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw Error(ErrorCode::infeasible_spec, "lognormal needs finite mu and sigma >= 0");
    }
    return {Family::lognormal, mu, sigma};
  }
  [[nodiscard]] static Marginal gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
      throw Error(ErrorCode::infeasible_spec, "gamma needs shape > 0 and scale > 0");
    }
    return {Family::gamma, shape, scale};
  }
  [[nodiscard]] static Marginal constant(double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::infeasible_spec, "constant must be finite");
    return {Family::constant, value, 0.0};
  }

  [[nodiscard]] Family family() const noexcept { return family_; }
  [[nodiscard]] double param1() const noexcept { return p1_; }
  [[nodiscard]] double param2() const noexcept { return p2_; }

  [[nodiscard]] bool degenerate() const noexcept {
    return family_ == Family::constant || (family_ == Family::lognormal && p2_ == 0.0);
  }

  /// F^{-1}(Phi(z)).
  [[nodiscard]] double from_normal(double z) const {
    switch (family_) {
      case Family::lognormal: return std::exp(p1_ + p2_ * z);
      case Family::gamma:
        return z <= 0.0 ? p2_ * boost::math::gamma_p_inv(p1_, standard_normal_cdf(z))
                        : p2_ * boost::math::gamma_q_inv(p1_, standard_normal_cdf(-z));
      case Family::constant: return p1_;
    }
    return 0.0;
  }

  [[nodiscard]] double mean() const noexcept {
    switch (family_) {
      case Family::lognormal: return std::exp(p1_ + p2_ * p2_ / 2.0);
      case Family::gamma: return p1_ * p2_;
      case Family::constant: return p1_;
    }
    return 0.0;
  }

  [[nodiscard]] double variance() const noexcept {
    switch (family_) {
      case Family::lognormal: return std::expm1(p2_ * p2_) * std::exp(2.0 * p1_ + p2_ * p2_);
      case Family::gamma: return p1_ * p2_ * p2_;
      case Family::constant: return 0.0;
    }
    return 0.0;
  }

  [[nodiscard]] double skewness() const noexcept {
    switch (family_) {
      case Family::lognormal: {
        const double e = std::expm1(p2_ * p2_);
        return (e + 3.0) * std::sqrt(e);
      }
      case Family::gamma: return 2.0 / std::sqrt(p1_);
      case Family::constant: return 0.0;
    }
    return 0.0;
  }

 private:
  Marginal(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

  Family family_;
  double p1_;
  double p2_;
};

struct GenSpec {
  std::size_t n_ticks = 0;
  double time_step = 1.0;  // spacing between consecutive deals
  double start_time = 0.0;
  Marginal value = Marginal::constant(1.0);
  Marginal volume = Marginal::constant(1.0);
  double target_corr_cu = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1; integrate against the standard normal density
};

/// Gauss-Hermite rule for the standard normal weight via Golub-Welsch.
inline const HermiteRule& hermite_rule() {
  static const HermiteRule rule = [] {
    constexpr int n = 96;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    HermiteRule r;
    for (int i = 0; i < n; ++i) {
      r.nodes.push_back(eig.eigenvalues()(i));
      const double v = eig.eigenvectors()(0, i);
      r.weights.push_back(v * v);
    }
    return r;
  }();
  return rule;
}

/// Pearson correlation of (F1^{-1}(Phi(z1)), F2^{-1}(Phi(z2))) for latent
/// normals with correlation rho.
inline double copula_pearson_lognormal(const Marginal& a, const Marginal& b, double rho) {
  const double sa = a.param2(), sb = b.param2();
  return std::expm1(rho * sa * sb) / std::sqrt(std::expm1(sa * sa) * std::expm1(sb * sb));
}

inline double copula_pearson_quadrature(const Marginal& a, const Marginal& b, double rho) {
  const auto& rule = hermite_rule();
  const double s = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  double joint = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ga = a.from_normal(rule.nodes[i]);
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      inner += rule.weights[j] * b.from_normal(rho * rule.nodes[i] + s * rule.nodes[j]);
    }
    joint += rule.weights[i] * ga * inner;
  }
  return (joint - a.mean() * b.mean()) / std::sqrt(a.variance() * b.variance());
}

inline double copula_pearson(const Marginal& a, const Marginal& b, double rho) {
  if (a.family() == Family::lognormal && b.family() == Family::lognormal) return copula_pearson_lognormal(a, b, rho);
  return copula_pearson_quadrature(a, b, rho);
}

}  // namespace detail

/// Attainable Pearson correlation range for the two marginals under the copula.
[[nodiscard]] inline std::pair<double, double> attainable_correlation(const Marginal& a, const Marginal& b) {
  if (a.degenerate() || b.degenerate()) return {0.0, 0.0};
  return {detail::copula_pearson(a, b, -1.0), detail::copula_pearson(a, b, 1.0)};
}

/// Latent normal correlation that realizes the target Pearson correlation.
[[nodiscard]] inline double latent_correlation(const Marginal& a, const Marginal& b, double target) {
  if (!(std::abs(target) <= 1.0)) throw Error(ErrorCode::infeasible_spec, "target correlation must lie in [-1, 1]");
  const auto [lo, hi] = attainable_correlation(a, b);
  if (target < lo - 1e-12 || target > hi + 1e-12) {
    std::ostringstream msg;
    msg << "target correlation " << target << " is outside the attainable range [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::infeasible_spec, msg.str());
  }
  if (a.degenerate() || b.degenerate() || target == 0.0) return 0.0;
  if (a.family() == Family::lognormal && b.family() == Family::lognormal) {
    const double sa = a.param2(), sb = b.param2();
    const double rho = std::log1p(target * std::sqrt(std::expm1(sa * sa) * std::expm1(sb * sb))) / (sa * sb);
    return std::clamp(rho, -1.0, 1.0);
  }
  double l = -1.0, h = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (l + h);
    (detail::copula_pearson(a, b, mid) < target ? l : h) = mid;
  }
  return 0.5 * (l + h);
}

inline void validate(const GenSpec& spec) {
  if (!(spec.time_step > 0.0) || !std::isfinite(spec.time_step) || !std::isfinite(spec.start_time)) {
    throw Error(ErrorCode::infeasible_spec, "time_step must be positive and start_time finite");
  }
  // Smallest and largest latent draws the uniform source can produce.
  const double z_min = standard_normal_quantile(0.5 * 0x1.0p-53);
  if (!(spec.volume.from_normal(z_min) > 0.0) || !(spec.volume.from_normal(-z_min) > 0.0)) {
    throw Error(ErrorCode::infeasible_spec, "volume distribution must be strictly positive");
  }
  if (!std::isfinite(spec.value.from_normal(-z_min)) || !std::isfinite(spec.volume.from_normal(-z_min))) {
    throw Error(ErrorCode::infeasible_spec, "distribution overflows at the extreme quantile");
  }
}

/// Draws ticks [begin, end) of the stream. Tick i depends only on (seed, i).
class TickGenerator {
 public:
  explicit TickGenerator(const GenSpec& spec)
      : spec_(spec), rho_(0.0), rng_(spec.seed, 0) {
    validate(spec_);
    rho_ = latent_correlation(spec_.value, spec_.volume, spec_.target_corr_cu);
    rho_c_ = std::sqrt(std::max(0.0, 1.0 - rho_ * rho_));
  }

  [[nodiscard]] TradeTick at(std::uint64_t i) const {
    const double z1 = standard_normal_quantile(rng_.uniform(2 * i));
    const double z2 = rho_ * z1 + rho_c_ * standard_normal_quantile(rng_.uniform(2 * i + 1));
    return {spec_.start_time + static_cast<double>(i) * spec_.time_step, spec_.value.from_normal(z1),
            spec_.volume.from_normal(z2)};
  }

  void fill(std::uint64_t begin, std::span<TradeTick> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(begin + k);
  }

  [[nodiscard]] double latent_rho() const noexcept { return rho_; }
  [[nodiscard]] const GenSpec& spec() const noexcept { return spec_; }

 private:
  GenSpec spec_;
  double rho_;
  double rho_c_ = 1.0;
  CounterRng rng_;
};

/// Whole stream, optionally sharded over threads; output is independent of
/// the thread count.
[[nodiscard]] inline std::vector<TradeTick> generate(const GenSpec& spec, unsigned threads = 1) {
  const TickGenerator gen(spec);
  std::vector<TradeTick> ticks(spec.n_ticks);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, spec.n_ticks))));
  if (threads == 1) {
    gen.fill(0, ticks);
    return ticks;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (spec.n_ticks + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = std::min(spec.n_ticks, t * chunk);
    const std::size_t e = std::min(spec.n_ticks, b + chunk);
    pool.emplace_back([&gen, &ticks, b, e] { gen.fill(b, std::span(ticks).subspan(b, e - b)); });
  }
  return ticks;
}

/// Deals of the generated stream, spread over agents by a deterministic
/// multinomial split keyed on `seed`. The pool window covers the stream.
[[nodiscard]] inline DealPool agent_pool(const GenSpec& spec, std::size_t n_agents, std::uint64_t seed) {
  if (n_agents == 0) throw Error(ErrorCode::infeasible_spec, "n_agents must be at least 1");
  const auto ticks = generate(spec);
  const CounterRng split(seed, 1);
  std::vector<Deal> deals;
  deals.reserve(ticks.size());
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const auto j = std::min(n_agents - 1, static_cast<std::size_t>(split.uniform(i) * static_cast<double>(n_agents)));
    deals.push_back({"agent-" + std::to_string(j), ticks[i].time, ticks[i].value});
  }
  const double width = static_cast<double>(std::max<std::size_t>(1, spec.n_ticks)) * spec.time_step;
  return DealPool(std::move(deals), WindowSpec::grid(spec.start_time, width, 0));
}

}  // namespace tickbound
