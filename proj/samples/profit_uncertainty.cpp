// Profit as sales minus expenses: how much of its relative uncertainty comes
// from each side and from their correlation.

#include <cstdio>
#include <vector>

#include "tickbound/composite_var.hpp"

int main() {
  using namespace tickbound;
  const std::vector<double> sales{120, 95, 143, 101, 130, 88};
  const std::vector<double> expenses{70, 61, 82, 66, 74, 59};

  const CompositeStats s = profit_stats(sales, expenses);
  std::printf("profit        %.4g\n", s.mean);
  std::printf("volatility    %.4g\n", s.volatility);
  std::printf("chi^2         %.4g\n", s.cv_sq);
  for (const auto& [label, theta] : s.theta) {
    std::printf("theta %-8s %.4g  (chi^2 %.4g)\n", label.c_str(), theta, s.chi_sq.at(label).value_or(0.0));
  }
  for (const auto& [key, phi] : s.phi) {
    std::printf("Phi[%s,%s] %.4g  Psi %.4g\n", key.first.c_str(), key.second.c_str(), phi, s.psi.at(key).value_or(0.0));
  }
  std::printf("sum theta + 2 sum Phi = %.17g\n", weight_normalization(s));
}
