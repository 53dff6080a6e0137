#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "tickbound/gauss_limit.hpp"
#include "tickbound/rng.hpp"

using namespace tickbound;
using tickbound::testing::rel_diff;

namespace {

// Standard normal CDF at 40 significant digits, rounded to 25.
struct CdfPoint {
  double z;
  double p;
};
constexpr CdfPoint kCdfTable[] = {
    {-8.0, 6.220960574271784123515995e-16}, {-5.0, 2.866515718791939116737523e-7},
    {-3.0, 0.001349898031630094526651815},  {-1.96, 0.02499789514822043621282369},
    {-1.0, 0.1586552539314570514147675},    {-0.5, 0.3085375387259868963622954},
    {0.0, 0.5},                             {0.25, 0.5987063256829237242408538},
    {1.0, 0.8413447460685429485852325},     {1.96, 0.9750021048517795637871763},
    {2.5, 0.9937903346742238648330219},     {4.0, 0.9999683287581668800787462},
    {6.0, 0.9999999990134123549623019},
};

}  // namespace

TEST(GaussianFromStats, Examples) {
  const GaussianApprox g = gaussian_from_stats(4.0, 1.0);
  EXPECT_EQ(g.mean, 4.0);
  EXPECT_EQ(g.variance, 1.0);
  EXPECT_FALSE(g.degenerate());

  const GaussianApprox point = gaussian_from_stats(2.0, 0.0);
  EXPECT_TRUE(point.degenerate());
  EXPECT_EQ(cdf(point, 1.999), 0.0);
  EXPECT_EQ(cdf(point, 2.0), 1.0);
  EXPECT_EQ(quantile(point, 0.3), 2.0);

  const GaussianApprox r = gaussian_from_stats(2.5, 0.45);
  EXPECT_EQ(r.mean, 2.5);
  EXPECT_EQ(r.variance, 0.45);
}

TEST(GaussianFromStats, RejectsBadStats) {
  try {
    (void)gaussian_from_stats(1.0, -0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_stats);
  }
  EXPECT_THROW((void)gaussian_from_stats(NAN, 1.0), Error);
}

TEST(GaussianFromStats, ReproducesTwoMoments) {
  const GaussianApprox g = gaussian_from_stats(-3.25, 2.5);
  EXPECT_EQ(central_moment(g, 1), 0.0);
  EXPECT_EQ(central_moment(g, 2), 2.5);
  EXPECT_EQ(central_moment(g, 3), 0.0);
  EXPECT_DOUBLE_EQ(central_moment(g, 4), 3 * 2.5 * 2.5);
}

TEST(Cdf, SymmetryAndReference) {
  const GaussianApprox unit = gaussian_from_stats(0.0, 1.0);
  EXPECT_EQ(cdf(unit, 0.0), 0.5);
  EXPECT_EQ(quantile(unit, 0.5), 0.0);
  EXPECT_NEAR(cdf(unit, 1.96), 0.9750021048517795, 1e-15);
  for (const auto& [z, p] : kCdfTable) {
    EXPECT_LT(rel_diff(standard_normal_cdf(z), p), 1e-12) << z;
  }
}

TEST(Cdf, LocationScale) {
  const GaussianApprox g = gaussian_from_stats(4.0, 0.25);
  for (const auto& [z, p] : kCdfTable) EXPECT_LT(rel_diff(cdf(g, 4.0 + 0.5 * z), p), 1e-12);
  EXPECT_NEAR(pdf(g, 4.0), 1.0 / std::sqrt(2 * M_PI * 0.25), 1e-15);
}

TEST(Quantile, InvertsCdf) {
  // Near p = 1 the double p itself carries the error: dz = eps p / phi(z).
  for (const auto& [z, p] : kCdfTable) {
    const double phi = std::exp(-z * z / 2) / std::sqrt(2 * M_PI);
    EXPECT_NEAR(standard_normal_quantile(p), z, 1e-12 * std::max(1.0, std::abs(z)) + 0x1.0p-52 * p / phi) << p;
  }
  for (double p = 1e-300; p < 0.5; p *= 7.3) {
    EXPECT_LT(rel_diff(standard_normal_cdf(standard_normal_quantile(p)), p), 1e-12) << p;
    if (p > 1e-12) EXPECT_LT(rel_diff(standard_normal_quantile(1 - p), -standard_normal_quantile(p)), 1e-3) << p;
  }
}

TEST(Quantile, DomainErrors) {
  const GaussianApprox unit = gaussian_from_stats(0.0, 1.0);
  for (double p : {0.0, 1.0, -0.5, 2.0}) {
    try {
      (void)quantile(unit, p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::domain);
    }
  }
}

TEST(GaussianGap, SamplesFromTheGaussianItself) {
  const GaussianApprox g = gaussian_from_stats(1.0, 4.0);
  const CounterRng rng(2024, 0);
  std::vector<double> xs(100000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = quantile(g, rng.uniform(i));
  const GapResult r = gaussian_gap(xs, g);
  EXPECT_LT(r.ks_statistic, 1.36 / std::sqrt(1e5) * 1.5);
  EXPECT_LT(std::abs(r.excess_skewness), 0.05);
  EXPECT_LT(std::abs(r.excess_kurtosis), 0.1);
  EXPECT_FALSE(r.infinite);
}

TEST(GaussianGap, ConstantSamplesAgainstPointMass) {
  const std::vector<double> xs(10, 3.0);
  const GapResult r = gaussian_gap(xs, gaussian_from_stats(3.0, 0.0));
  EXPECT_EQ(r.ks_statistic, 0.0);
  EXPECT_EQ(r.excess_skewness, 0.0);
  EXPECT_EQ(r.excess_kurtosis, 0.0);
  EXPECT_FALSE(r.infinite);
}

TEST(GaussianGap, PointMassAgainstSpreadSamplesIsInfinite) {
  const std::vector<double> xs{1.0, 2.0, 3.0};
  const GapResult r = gaussian_gap(xs, gaussian_from_stats(2.0, 0.0));
  EXPECT_TRUE(r.infinite);
  EXPECT_TRUE(std::isinf(r.ks_statistic));
}

TEST(GaussianGap, ExponentialSkewness) {
  const CounterRng rng(99, 0);
  std::vector<double> xs(1'000'000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -std::log(rng.uniform(i));
  const auto m = tickbound::testing::long_stats(xs);
  const GapResult r = gaussian_gap(xs, gaussian_from_stats(static_cast<double>(m.mean), static_cast<double>(m.var)));
  EXPECT_LT(std::abs(r.excess_skewness - 2.0), 0.1);
  EXPECT_GT(r.excess_kurtosis, 4.0);
  EXPECT_GT(r.ks_statistic, 0.05);
}

TEST(GaussianGap, KsHandlesTiesWithLeftLimit) {
  // Half the mass at -10, half at +10 against N(0,1): the empirical CDF jumps
  // from 0 to 0.5 at -10 and stays there until +10, so D is about 0.5.
  std::vector<double> xs(50, -10.0);
  xs.insert(xs.end(), 50, 10.0);
  const GapResult r = gaussian_gap(xs, gaussian_from_stats(0.0, 1.0));
  EXPECT_NEAR(r.ks_statistic, 0.5, 1e-12);
  EXPECT_THROW((void)gaussian_gap(std::vector<double>{1.0}, gaussian_from_stats(0.0, 1.0)), Error);
}
