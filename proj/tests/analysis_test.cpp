// Copyright 2026 The arraywos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "arraywos/analysis.hpp"
#include "arraywos/rng.hpp"

namespace arraywos {
namespace {

// Adaptive Gauss-Kronrod integral of the kernel, independent of the closed
// form used by poisson_cdf.
double quadrature_cdf(const Vec3& z, double x) {
  if (x <= 0.0) return 0.0;
  auto f = [&](double t) { return poisson_kernel(z, t); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-13, &err);
}

double cdf_inverse(const Vec3& z, double p) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (poisson_cdf(z, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Stats, SampleStats) {
  const std::vector<double> x{1, 2, 3, 4};
  const SampleStats s = sample_stats(x);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.se, std::sqrt(5.0 / 12.0));
  EXPECT_DOUBLE_EQ(mean_squared_error(x, 2.0), (1 + 0 + 1 + 4) / 4.0);
}

TEST(Stats, MseIsVarianceplusBiasSquared) {
  SplitMix64 rng(2);
  std::vector<double> x(50);
  for (double& v : x) v = rng.uniform();
  const SampleStats s = sample_stats(x);
  const double mse = mean_squared_error(x, 0.3);
  const double biased = s.variance * (x.size() - 1) / x.size() + (s.mean - 0.3) * (s.mean - 0.3);
  EXPECT_NEAR(mse, biased, 1e-15);
}

TEST(Stats, LogLogFitRecoversPlantedSlopes) {
  for (double slope : {-1.0, -1.5, -1.78, -2.0}) {
    std::vector<std::pair<double, double>> pts;
    for (int m = 7; m <= 17; ++m) pts.emplace_back(std::ldexp(1.0, m), 3.7 * std::pow(std::ldexp(1.0, m), slope));
    const LogLogFit f = fit_loglog(pts);
    EXPECT_NEAR(f.slope, slope, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.7), 1e-10);
    EXPECT_EQ(f.used, 11u);
  }
}

TEST(Stats, LogLogFitExcludesSmallSamples) {
  std::vector<std::pair<double, double>> pts{{16, 1e6}, {64, 1e-9}, {128, 1.0 / 128}, {256, 1.0 / 256}, {1024, 1.0 / 1024}};
  const LogLogFit f = fit_loglog(pts);
  EXPECT_EQ(f.used, 3u);
  EXPECT_NEAR(f.slope, -1.0, 1e-12);
  const std::vector<std::pair<double, double>> few{{16, 1.0}, {64, 0.5}, {128, 0.1}};
  EXPECT_THROW(fit_loglog(few), std::invalid_argument);
}

TEST(Stats, ReductionFactor) {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0}, b{1.0, 3.0, 5.0, 7.0};
  const Ratio self = reduction_factor(a, a);
  EXPECT_EQ(self.value, 1.0);
  EXPECT_DOUBLE_EQ(self.se, std::sqrt(4.0 / 3.0));
  EXPECT_DOUBLE_EQ(reduction_factor(a, b).value, 4.0);
  EXPECT_DOUBLE_EQ(reduction_factor(a, b, 0.0).value, mean_squared_error(b, 0.0) / mean_squared_error(a, 0.0));
  const std::vector<double> flat{2.0, 2.0};
  EXPECT_THROW(reduction_factor(flat, b), std::invalid_argument);
}

TEST(Poisson, KernelValues) {
  for (double x : {0.0, 0.1, 0.77}) EXPECT_DOUBLE_EQ(poisson_kernel({0, 0, 0}, x), 1.0);
  EXPECT_DOUBLE_EQ(poisson_kernel({0.5, 0, 0}, 0.0), 3.0);
  EXPECT_THROW(poisson_kernel({1.0, 0, 0}, 0.2), std::invalid_argument);
}

TEST(Poisson, QuadratureOracleNormalization) {
  for (double t : {1.0 / 3, 0.5, 0.75, 0.9}) {
    const Vec3 z{t, 0, 0};
    EXPECT_NEAR(quadrature_cdf(z, 1.0), 1.0, 1e-10) << t;
    EXPECT_EQ(poisson_cdf(z, 1.0), 1.0);
  }
}

TEST(Poisson, ClosedFormMatchesQuadrature) {
  EXPECT_NEAR(poisson_cdf({0.5, 0, 0}, 0.25), quadrature_cdf({0.5, 0, 0}, 0.25), 1e-10);
  SplitMix64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const double rho = 0.95 * rng.uniform(), phi = kTwoPi * rng.uniform();
    const Vec3 z{rho * std::cos(phi), rho * std::sin(phi), 0};
    const double x = rng.uniform();
    EXPECT_NEAR(poisson_cdf(z, x), quadrature_cdf(z, x), 1e-10) << rho << " " << phi << " " << x;
  }
}

TEST(Poisson, CdfShape) {
  for (double x : {0.0, 0.2, 0.5, 0.9}) EXPECT_NEAR(poisson_cdf({0, 0, 0}, x), x, 1e-15);
  for (double t : {1.0 / 3, 0.5, 0.75, 0.9}) EXPECT_NEAR(poisson_cdf({t, 0, 0}, 0.5), 0.5, 1e-14);
  for (double t : {0.0, 0.5, 0.9, -0.7}) {
    double prev = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double v = poisson_cdf({t, 0.1 * t, 0}, i / 10000.0);
      EXPECT_GE(v, prev);
      prev = v;
    }
    EXPECT_EQ(prev, 1.0);
  }
}

TEST(Poisson, TerminalAngle) {
  EXPECT_EQ(terminal_angle({1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(terminal_angle({0, 1, 0}), 0.25);
  EXPECT_DOUBLE_EQ(terminal_angle({0, -1, 0}), 0.75);
  EXPECT_LT(terminal_angle({1, -1e-300, 0}), 1.0);
}

TEST(Ks, OptimalPointsReachLowerBound) {
  for (double t : {0.0, 0.5, 0.9}) {
    const Vec3 z{t, 0, 0};
    for (std::size_t n : {1u, 10u, 256u}) {
      std::vector<double> pts(n);
      for (std::size_t i = 0; i < n; ++i) pts[i] = cdf_inverse(z, (2.0 * i + 1) / (2.0 * n));
      EXPECT_NEAR(ks_distance(pts, z), 0.5 / n, 1e-12);
      EXPECT_EQ(ks_reference_opt(n), 0.5 / n);
    }
  }
  const Vec3 z{0.5, 0, 0};
  const double median[] = {cdf_inverse(z, 0.5)};
  EXPECT_NEAR(ks_distance(median, z), 0.5, 1e-12);
  EXPECT_THROW(ks_distance(std::span<const double>{}, z), std::invalid_argument);
  EXPECT_NEAR(ks_reference_mc(1024), 0.02715, 1e-5);
}

TEST(Ks, TwoSample) {
  const std::vector<double> a{0.1, 0.2, 0.3}, b{0.4, 0.5, 0.6};
  EXPECT_EQ(ks_two_sample_statistic(a, b), 1.0);
  EXPECT_EQ(ks_two_sample_statistic(a, a), 0.0);
  EXPECT_EQ(ks_two_sample_pvalue(0.0, 100, 100), 1.0);
  // Critical value of the asymptotic test at the 5% level: 1.358 sqrt(2/n).
  const std::size_t n = 1000;
  EXPECT_NEAR(ks_two_sample_pvalue(1.358 * std::sqrt(2.0 / n), n, n), 0.05, 0.005);
  SplitMix64 rng(3);
  std::vector<double> x(5000), y(5000);
  for (double& v : x) v = rng.uniform();
  for (double& v : y) v = rng.uniform();
  EXPECT_GT(ks_two_sample_pvalue(ks_two_sample_statistic(x, y), x.size(), y.size()), 0.001);
  for (double& v : y) v = v * v;
  EXPECT_LT(ks_two_sample_pvalue(ks_two_sample_statistic(x, y), x.size(), y.size()), 1e-6);
}

TEST(Jansen, AdditiveFunctionalHasMeanDimensionOne) {
  const SobolReport r = jansen_indices(synthetic_additive(64, 5), 5, 5, 2000, 7);
  EXPECT_NEAR(r.nu, 1.0, 3 * r.nu_se);
  EXPECT_NEAR(r.sigma2, 5.0, 0.5);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(r.tau2[k], 1.0, 3 * r.tau2_se[k]);
  EXPECT_EQ(r.convention, "column");
}

TEST(Jansen, ProductFunctionalHasMeanDimensionTwo) {
  const SobolReport r = jansen_indices(synthetic_product(64), 2, 2, 4000, 8);
  EXPECT_NEAR(r.nu, 2.0, 3 * r.nu_se);
}

TEST(Jansen, UnusedColumnsHaveZeroIndex) {
  const SobolReport r = jansen_indices(synthetic_additive(32, 3), 6, 6, 300, 9);
  for (std::size_t k = 3; k < 6; ++k) EXPECT_EQ(r.tau2[k], 0.0);
  EXPECT_GT(r.tau2[0], 0.0);
}

TEST(Jansen, SingleColumnTruncation) {
  const SobolReport r = jansen_indices(synthetic_additive(32, 3), 3, 1, 500, 10);
  ASSERT_EQ(r.tau2.size(), 1u);
  EXPECT_LE(r.nu, 1.0);
  EXPECT_DOUBLE_EQ(r.nu, r.tau2_normalized()[0]);
  EXPECT_DOUBLE_EQ(mean_dimension(r), r.nu);
}

TEST(Jansen, SingleIndexMatchesReport) {
  const auto F = synthetic_additive(16, 4);
  const SobolReport r = jansen_indices(F, 4, 4, 100, 11);
  for (int k = 1; k <= 4; ++k) EXPECT_DOUBLE_EQ(jansen_total_index(F, 4, k, 100, 11), r.tau2[k - 1]);
  EXPECT_THROW(jansen_total_index(F, 4, 5, 100, 11), std::invalid_argument);
}

TEST(Jansen, ConstantFunctionalIsRejected) {
  const ScheduleFunctional F = [](std::span<const std::uint64_t>) { return 1.0; };
  const SobolReport r = jansen_indices(F, 3, 3, 50, 1);
  EXPECT_EQ(r.sigma2, 0.0);
  EXPECT_THROW(mean_dimension(r), std::invalid_argument);
}

TEST(Jansen, WosReportIsThreadIndependent) {
  const Scene d = unit_disk();
  RunConfig rc;
  rc.method = Method::ArrayRQMC;
  rc.points = Construction::Sobol;
  rc.n = 64;
  const WalkEngine engine(d, rc);
  const SobolReport a = jansen_wos(engine, 5, 12, 3, 1), b = jansen_wos(engine, 5, 12, 3, 3);
  EXPECT_EQ(a.tau2, b.tau2);
  EXPECT_EQ(a.sigma2, b.sigma2);
  EXPECT_EQ(a.nu, b.nu);
  EXPECT_EQ(a.convention, "column");
  RunConfig pc = rc;
  const Scene pm = pacman();
  EXPECT_EQ(jansen_wos(WalkEngine(pm, pc), 2, 4, 3, 1).convention, "step-block");
}

TEST(Jansen, SyntheticScore) {
  SplitMix64 rng(1);
  double sum = 0.0, sq = 0.0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    const double a = synthetic_column_score(rng(), 16);
    sum += a;
    sq += a * a;
  }
  EXPECT_NEAR(sum / reps, 0.0, 0.03);
  EXPECT_NEAR(sq / reps, 1.0, 0.05);
}

}  // namespace
}  // namespace arraywos
