#pragma once

// Analysis report document. Every numeric field is either a finite number or
// an explicit {"degenerate": "<reason>"} marker; fields are never dropped
// because they are degenerate.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tickbound/canonical_json.hpp"
#include "tickbound/composite_var.hpp"
#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/gauss_limit.hpp"
#include "tickbound/macro_agg.hpp"
#include "tickbound/market_price.hpp"
#include "tickbound/market_return.hpp"
#include "tickbound/trade_core.hpp"
#include "tickbound/version.hpp"

namespace tickbound {

struct PriceSection {
  PriceStats direct;
  PriceStats closed_form;
};

struct ReturnSection {
  double lag = 0.0;
  std::size_t resolved = 0;
  std::size_t unresolved = 0;
  std::optional<MomentSet> moments;  // of (C, C_o); empty when nothing resolved
  std::optional<ReturnStats> direct;
  std::optional<ReturnStats> closed_form;
};

struct CompositeSection {
  CompositeMoments moments;
  std::optional<CompositeStats> stats;  // empty when the composite mean is zero
  std::optional<double> normalization;  // sum theta + 2 sum Phi
  std::optional<double> cv_sq_decomposed;
  std::optional<MonteCarloResult> monte_carlo;
};

struct AnalysisReport {
  std::string command;
  std::optional<WindowSpec> window;
  std::optional<MomentSet> moments;
  std::optional<PriceSection> price;
  std::optional<ReturnSection> returns;
  std::optional<AggregateStats> aggregate;
  std::optional<CvTransfer> cv_transfer;
  std::optional<CompositeSection> composite;
  std::map<std::string, GaussianApprox> gaussians;
  std::map<std::string, GapResult> gaps;
  Json provenance;  // null when unknown
  std::vector<std::string> warnings;
};

/// Relative discrepancy |a - b| / max(|a|, |b|), 0 when both are 0.
[[nodiscard]] inline double relative_gap(double a, double b) noexcept {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Gaussian from a mean and a variance that may carry a rounding-level
/// negative residue (at most 1e-12 of `scale`), which is treated as zero.
[[nodiscard]] inline GaussianApprox gaussian_with_floor(double mean, double volatility, double scale) {
  if (volatility < 0.0 && volatility >= -1e-12 * std::abs(scale)) volatility = 0.0;
  return gaussian_from_stats(mean, volatility);
}

namespace detail {

inline Json degenerate(const std::string& reason) { return {{"degenerate", reason}}; }

inline Json number_or(const std::optional<double>& x, const std::string& reason) {
  return x && std::isfinite(*x) ? Json(*x) : degenerate(reason);
}

inline Json finite_or(double x, const std::string& reason) { return std::isfinite(x) ? Json(x) : degenerate(reason); }

inline Json moments_json(const MomentSet& m, const char* value_name, const char* volume_name) {
  Json j;
  j["n"] = m.n_ticks;
  Json vm = Json::array(), um = Json::array();
  for (int k = 1; k <= kMaxMomentOrder; ++k) {
    vm.push_back(m.value_moment(k));
    um.push_back(m.volume_moment(k));
  }
  j[std::string(value_name) + "_moments"] = vm;
  j[std::string(volume_name) + "_moments"] = um;
  j[std::string(value_name) + "_volatility"] = m.value_volatility;
  j[std::string(volume_name) + "_volatility"] = m.volume_volatility;
  j["cross_mean"] = m.cross_cu;
  j["covariance"] = m.corr_cu;
  return j;
}

inline Json price_json(const PriceStats& p) {
  return {{"mean", p.mean},
          {"second_moment", p.second_moment},
          {"volatility", p.volatility},
          {"cv_sq", number_or(p.cv_sq, "zero mean")},
          {"weighted_price_m1", p.weighted_price_m1},
          {"weighted_price_m2", p.weighted_price_m2}};
}

inline Json return_json(const ReturnStats& r) {
  return {{"mean", r.mean},
          {"second_moment", r.second_moment},
          {"volatility", r.volatility},
          {"cv_sq", number_or(r.cv_sq, "zero mean")}};
}

inline Json path_gap_json(double vol_a, double vol_b, double m2_a, double m2_b) {
  return {{"volatility_abs", std::abs(vol_a - vol_b)},
          {"volatility_rel", relative_gap(vol_a, vol_b)},
          {"second_moment_abs", std::abs(m2_a - m2_b)},
          {"second_moment_rel", relative_gap(m2_a, m2_b)}};
}

inline Json gaussian_json(const GaussianApprox& g) {
  Json j{{"mean", g.mean}, {"variance", g.variance}};
  j["kind"] = g.degenerate() ? "point_mass" : "normal";
  if (g.degenerate()) j["degenerate"] = "zero variance";
  return j;
}

inline Json gap_json(const GapResult& r) {
  if (r.infinite) {
    return {{"ks_statistic", degenerate("point-mass model against dispersed data")},
            {"excess_skewness", degenerate("point-mass model against dispersed data")},
            {"excess_kurtosis", degenerate("point-mass model against dispersed data")}};
  }
  return {{"ks_statistic", r.ks_statistic}, {"excess_skewness", r.excess_skewness}, {"excess_kurtosis", r.excess_kurtosis}};
}

inline std::string pair_key(const LabelPair& p) { return p.first + "|" + p.second; }

}  // namespace detail

[[nodiscard]] inline Json to_json(const AnalysisReport& r) {
  using namespace detail;
  Json j;
  j["schema"] = kReportSchema;
  j["engine_version"] = kEngineVersion;
  j["command"] = r.command;
  j["provenance"] = r.provenance.is_null() ? Json{{"source", "external input"}} : r.provenance;
  j["warnings"] = r.warnings;
  if (r.window) {
    j["window"] = {{"center", r.window->center()}, {"width", r.window->width()}, {"lo", r.window->lo()},
                   {"hi", r.window->hi()}};
  }
  if (r.moments) j["moments"] = moments_json(*r.moments, "value", "volume");
  if (r.price) {
    j["price"] = {{"direct", price_json(r.price->direct)},
                  {"closed_form", price_json(r.price->closed_form)},
                  {"path_gap", path_gap_json(r.price->direct.volatility, r.price->closed_form.volatility,
                                             r.price->direct.second_moment, r.price->closed_form.second_moment)}};
  }
  if (r.returns) {
    const auto& s = *r.returns;
    Json rj{{"lag", s.lag}, {"resolved", s.resolved}, {"unresolved", s.unresolved}};
    if (s.direct && s.closed_form && s.moments) {
      rj["status"] = "ok";
      rj["moments"] = moments_json(*s.moments, "value", "past_value");
      rj["direct"] = return_json(*s.direct);
      rj["closed_form"] = return_json(*s.closed_form);
      rj["path_gap"] = path_gap_json(s.direct->volatility, s.closed_form->volatility, s.direct->second_moment,
                                     s.closed_form->second_moment);
    } else {
      rj["status"] = "empty";
      rj["direct"] = degenerate("no tick has a past price at this lag");
      rj["closed_form"] = degenerate("no tick has a past price at this lag");
    }
    j["returns"] = rj;
  }
  if (r.aggregate) {
    const auto& a = *r.aggregate;
    j["aggregate"] = {{"k", a.k},
                      {"deal_mean", a.deal_mean},
                      {"deal_second", a.deal_second},
                      {"deal_volatility", a.deal_volatility},
                      {"total", a.total},
                      {"total_second", a.total_second},
                      {"agg_mean", a.agg_mean},
                      {"agg_second", a.agg_second},
                      {"agg_volatility", a.agg_volatility},
                      {"agg_cv_sq", number_or(a.agg_cv_sq, "zero mean")},
                      {"deal_cv_sq", number_or(a.deal_cv_sq, "zero mean")}};
    if (r.cv_transfer) j["aggregate"]["cv_transfer_gap"] = r.cv_transfer->gap;
    else j["aggregate"]["cv_transfer_gap"] = degenerate("zero mean");
  }
  if (r.composite) {
    const auto& c = *r.composite;
    Json cj{{"mean", c.moments.mean}, {"volatility", c.moments.volatility}};
    if (c.stats) {
      cj["cv_sq"] = c.stats->cv_sq;
      Json theta, chi, phi, psi;
      for (const auto& [k, v] : c.stats->theta) theta[k] = v;
      for (const auto& [k, v] : c.stats->chi_sq) chi[k] = number_or(v, "zero component mean");
      for (const auto& [k, v] : c.stats->phi) phi[pair_key(k)] = v;
      for (const auto& [k, v] : c.stats->psi) psi[pair_key(k)] = number_or(v, "zero component mean");
      cj["theta"] = theta.is_null() ? Json::object() : theta;
      cj["chi_sq"] = chi.is_null() ? Json::object() : chi;
      cj["phi"] = phi.is_null() ? Json::object() : phi;
      cj["psi"] = psi.is_null() ? Json::object() : psi;
    } else {
      cj["cv_sq"] = degenerate("zero composite mean");
    }
    cj["normalization"] = number_or(c.normalization, "zero composite mean");
    cj["cv_sq_decomposed"] = number_or(c.cv_sq_decomposed, "undefined decomposition");
    if (c.monte_carlo) {
      cj["monte_carlo"] = {{"draws", c.monte_carlo->draws},
                           {"sample_mean", c.monte_carlo->sample_mean},
                           {"sample_variance", c.monte_carlo->sample_variance},
                           {"mean_standard_error", c.monte_carlo->mean_standard_error},
                           {"variance_standard_error", c.monte_carlo->variance_standard_error}};
    }
    j["composite"] = cj;
  }
  if (!r.gaussians.empty()) {
    Json g;
    for (const auto& [k, v] : r.gaussians) g[k] = gaussian_json(v);
    j["gaussian"] = g;
  }
  if (!r.gaps.empty()) {
    Json g;
    for (const auto& [k, v] : r.gaps) g[k] = gap_json(v);
    j["gaussian_gap"] = g;
  }
  return j;
}

inline void write_report(const AnalysisReport& report, std::ostream& out) { out << to_canonical_json(to_json(report)); }

inline void write_report(const AnalysisReport& report, const std::string& path) {
  const auto text = to_canonical_json(to_json(report));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

}  // namespace tickbound
