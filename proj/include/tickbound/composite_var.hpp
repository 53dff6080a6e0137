#pragma once

// Uncertainty of a linear combination a = sum_q beta(q) a(q) of random
// components with known means, volatilities and pairwise covariances.
//
// Cross terms carry the sign of beta(q) beta(k): with that convention the
// weights theta(q) and Phi(q,k) satisfy
//   sum_q theta(q) + 2 sum_{q<k} Phi(q,k) = 1
// for any signs of the coefficients.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/gauss_limit.hpp"
#include "tickbound/rng.hpp"
#include "tickbound/summation.hpp"

namespace tickbound {

struct ComponentStat {
  std::string label;
  double beta = 1.0;        // may be negative
  double mean = 0.0;        // A(q)
  double volatility = 0.0;  // sigma^2(q)
};

using LabelPair = std::pair<std::string, std::string>;

/// Symmetric map of pairwise covariances corr(q,k) = E[a(q)a(k)] - A(q)A(k).
class CorrelationMatrix {
 public:
  void set(const std::string& a, const std::string& b, double value) { entries_[key(a, b)] = value; }

  [[nodiscard]] std::optional<double> get(const std::string& a, const std::string& b) const {
    auto it = entries_.find(key(a, b));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] const std::map<LabelPair, double>& entries() const noexcept { return entries_; }

 private:
  static LabelPair key(const std::string& a, const std::string& b) { return a < b ? LabelPair{a, b} : LabelPair{b, a}; }

  std::map<LabelPair, double> entries_;
};

struct CompositeMoments {
  double mean = 0.0;        // A
  double volatility = 0.0;  // sigma_A^2
};

struct CompositeStats {
  double mean = 0.0;
  double volatility = 0.0;
  double cv_sq = 0.0;                                    // chi_A^2 = sigma_A^2 / A^2
  std::map<std::string, double> theta;                   // beta^2 A(q)^2 / A^2
  std::map<std::string, std::optional<double>> chi_sq;   // sigma^2(q) / A(q)^2
  std::map<LabelPair, double> phi;                       // beta(q) beta(k) A(q) A(k) / A^2, keyed (q, k) with q before k
  std::map<LabelPair, std::optional<double>> psi;        // corr(q,k) / (A(q) A(k))
};

namespace detail {

inline void validate_components(std::span<const ComponentStat> components) {
  if (components.empty()) throw Error(ErrorCode::incomplete_spec, "composite needs at least one component");
  std::set<std::string> seen;
  for (const auto& c : components) {
    if (!seen.insert(c.label).second) throw Error(ErrorCode::incomplete_spec, "duplicate component label '" + c.label + "'");
    if (!std::isfinite(c.beta) || !std::isfinite(c.mean) || !std::isfinite(c.volatility)) {
      throw Error(ErrorCode::incomplete_spec, "component '" + c.label + "' has a non-finite field");
    }
    if (c.volatility < 0.0) throw Error(ErrorCode::infeasible_spec, "component '" + c.label + "' has negative volatility");
  }
}

inline double pair_covariance(const CorrelationMatrix& corr, const ComponentStat& q, const ComponentStat& k) {
  const auto c = corr.get(q.label, k.label);
  if (!c) throw Error(ErrorCode::incomplete_spec, "missing correlation for (" + q.label + ", " + k.label + ")");
  const double bound = std::sqrt(q.volatility * k.volatility);
  if (std::abs(*c) > bound * (1.0 + 1e-9) + 1e-300) {
    throw Error(ErrorCode::infeasible_spec, "|corr(" + q.label + ", " + k.label + ")| exceeds sqrt(sigma^2 sigma^2)");
  }
  return *c;
}

}  // namespace detail

/// A = sum beta A(q); sigma_A^2 = sum beta^2 sigma^2 + 2 sum_{q<k} beta beta corr.
[[nodiscard]] inline CompositeMoments composite_moments(std::span<const ComponentStat> components,
                                                        const CorrelationMatrix& corr) {
  detail::validate_components(components);
  CompensatedSum mean, var;
  for (std::size_t q = 0; q < components.size(); ++q) {
    const auto& cq = components[q];
    mean += cq.beta * cq.mean;
    var += cq.beta * cq.beta * cq.volatility;
    for (std::size_t k = q + 1; k < components.size(); ++k) {
      const auto& ck = components[k];
      var += 2.0 * cq.beta * ck.beta * detail::pair_covariance(corr, cq, ck);
    }
  }
  return {mean.value(), var.value()};
}

[[nodiscard]] inline CompositeStats composite_stats(std::span<const ComponentStat> components,
                                                    const CorrelationMatrix& corr) {
  const auto m = composite_moments(components, corr);
  if (m.mean == 0.0) throw Error(ErrorCode::undefined_cv, "composite mean is zero");
  const double a2 = m.mean * m.mean;

  CompositeStats s;
  s.mean = m.mean;
  s.volatility = m.volatility;
  s.cv_sq = m.volatility / a2;
  for (std::size_t q = 0; q < components.size(); ++q) {
    const auto& cq = components[q];
    s.theta[cq.label] = cq.beta * cq.beta * cq.mean * cq.mean / a2;
    s.chi_sq[cq.label] = cq.mean != 0.0 ? std::optional(cq.volatility / (cq.mean * cq.mean)) : std::nullopt;
    for (std::size_t k = q + 1; k < components.size(); ++k) {
      const auto& ck = components[k];
      const LabelPair key{cq.label, ck.label};
      s.phi[key] = cq.beta * ck.beta * cq.mean * ck.mean / a2;
      const double c = detail::pair_covariance(corr, cq, ck);
      const double am = cq.mean * ck.mean;
      s.psi[key] = am != 0.0 ? std::optional(c / am) : std::nullopt;
    }
  }
  return s;
}

/// sum theta + 2 sum Phi; equals 1 for every composite.
[[nodiscard]] inline double weight_normalization(const CompositeStats& s) {
  CompensatedSum total;
  for (const auto& [_, t] : s.theta) total += t;
  for (const auto& [_, p] : s.phi) total += 2.0 * p;
  return total.value();
}

/// chi_A^2 rebuilt from its decomposition sum theta chi^2 + 2 sum Phi Psi.
/// Empty when some component mean is zero.
[[nodiscard]] inline std::optional<double> cv_sq_decomposed(const CompositeStats& s) {
  CompensatedSum total;
  for (const auto& [label, t] : s.theta) {
    const auto& chi = s.chi_sq.at(label);
    if (!chi) return std::nullopt;
    total += t * *chi;
  }
  for (const auto& [key, p] : s.phi) {
    const auto& psi = s.psi.at(key);
    if (!psi) return std::nullopt;
    total += 2.0 * p * *psi;
  }
  return total.value();
}

namespace detail {

inline std::vector<ComponentStat> profit_components(std::span<const double> sales, std::span<const double> expenses) {
  if (sales.empty() || expenses.empty()) throw Error(ErrorCode::empty_window, "sales and expenses must be nonempty");
  const auto s = accumulate(sales);
  const auto e = accumulate(expenses);
  return {
      {"sales", static_cast<double>(sales.size()), s.mean(), s.volatility()},
      {"expenses", -static_cast<double>(expenses.size()), e.mean(), e.volatility()},
  };
}

}  // namespace detail

/// Profit = sum of sales - sum of expenses, as the composite
/// K_S Sa - K_E Ex over per-deal means and volatilities, with corr(S,E) given.
[[nodiscard]] inline CompositeStats profit_stats(std::span<const double> sales, std::span<const double> expenses,
                                                 double corr_se) {
  const auto comps = detail::profit_components(sales, expenses);
  CorrelationMatrix corr;
  corr.set("sales", "expenses", corr_se);
  return composite_stats(comps, corr);
}

/// As above, estimating corr(S,E) = E[Sa Ex] - Sa(1) Ex(1) from an index-by-index
/// pairing of the two deal sequences. The caller owns the pairing; the lengths
/// must match.
[[nodiscard]] inline CompositeStats profit_stats(std::span<const double> sales, std::span<const double> expenses) {
  if (sales.size() != expenses.size()) {
    throw Error(ErrorCode::incomplete_spec, "sales and expenses cannot be paired (" + std::to_string(sales.size()) +
                                                " vs " + std::to_string(expenses.size()) +
                                                " deals); supply corr(S,E) explicitly");
  }
  return profit_stats(sales, expenses, cross_correlation(sales, expenses));
}

struct MonteCarloResult {
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double mean_standard_error = 0.0;
  double variance_standard_error = 0.0;  // sqrt((m4 - m2^2) / n)
  std::uint64_t draws = 0;
};

/// Samples the components jointly as a multivariate Gaussian with the given
/// means and covariance matrix and returns the empirical mean and variance of
/// sum beta(q) a(q). Reproducible for a given seed.
[[nodiscard]] inline MonteCarloResult monte_carlo_composite_oracle(std::span<const ComponentStat> components,
                                                                   const CorrelationMatrix& corr, std::uint64_t draws,
                                                                   std::uint64_t seed) {
  detail::validate_components(components);
  if (draws < 10000) throw Error(ErrorCode::domain, "Monte Carlo oracle needs at least 10^4 draws");
  const auto q = static_cast<Eigen::Index>(components.size());
  Eigen::MatrixXd cov(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    cov(i, i) = components[static_cast<std::size_t>(i)].volatility;
    for (Eigen::Index j = i + 1; j < q; ++j) {
      const double c = detail::pair_covariance(corr, components[static_cast<std::size_t>(i)],
                                               components[static_cast<std::size_t>(j)]);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
  if (lambda.minCoeff() < -1e-10 * scale) {
    throw Error(ErrorCode::infeasible_spec, "correlation matrix is not positive semidefinite (min eigenvalue " +
                                                std::to_string(lambda.minCoeff()) + ")");
  }
  const Eigen::MatrixXd factor = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Eigen::VectorXd beta(q), mu(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    beta(i) = components[static_cast<std::size_t>(i)].beta;
    mu(i) = components[static_cast<std::size_t>(i)].mean;
  }
  // Only beta^T (mu + L z) is needed per draw.
  const Eigen::RowVectorXd loading = beta.transpose() * factor;
  const double center = beta.dot(mu);

  const CounterRng rng(seed, 0);
  std::vector<double> samples(draws);
  CompensatedSum sum;
  for (std::uint64_t i = 0; i < draws; ++i) {
    double x = center;
    for (Eigen::Index j = 0; j < q; ++j) {
      x += loading(j) * standard_normal_quantile(rng.uniform(i * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(j)));
    }
    samples[i] = x;
    sum += x;
  }
  const double n = static_cast<double>(draws);
  const double m = sum.value() / n;
  CompensatedSum c2, c4;
  for (double x : samples) {
    const double d = (x - m) * (x - m);
    c2 += d;
    c4 += d * d;
  }
  MonteCarloResult r;
  r.draws = draws;
  r.sample_mean = m;
  r.sample_variance = c2.value() / n;
  r.mean_standard_error = std::sqrt(r.sample_variance / n);
  r.variance_standard_error = std::sqrt(std::max(c4.value() / n - r.sample_variance * r.sample_variance, 0.0) / n);
  return r;
}

}  // namespace tickbound
