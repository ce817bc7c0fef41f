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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arraywos/geometry.hpp"
#include "arraywos/wos_engine.hpp"

namespace arraywos {

// ---------------------------------------------------------------------------
// Replicate statistics

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;        // standard error of the mean
};

SampleStats sample_stats(std::span<const double> x);
double mean_squared_error(std::span<const double> estimates, double truth);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t used = 0;
};

inline constexpr double kMinFitSampleSize = 128.0;

// OLS of log(value) on log(n) over the pairs with n >= min_n.
LogLogFit fit_loglog(std::span<const std::pair<double, double>> points,
                     double min_n = kMinFitSampleSize);

struct Ratio {
  double value = 0.0;
  double se = 0.0;
};

// Var_MC / Var_method, or the MSE ratio when `truth` is given. The standard
// error uses the chi-square delta method: R * sqrt(2/(r_A - 1) + 2/(r_B - 1)).
Ratio reduction_factor(std::span<const double> method_values, std::span<const double> mc_values,
                       std::optional<double> truth = std::nullopt);

// ---------------------------------------------------------------------------
// Exit distribution on the unit circle

double poisson_kernel(const Vec3& z, double x);
// Integral of poisson_kernel(z, .) over [0, x], x in [0, 1].
double poisson_cdf(const Vec3& z, double x);

// Angle of a boundary point as a fraction of a full turn, in [0, 1).
double terminal_angle(const Vec3& p);

// sup |ECDF - cdf| over the jump points of the sample.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);
double ks_distance(std::span<const double> angles, const Vec3& z);

double ks_reference_mc(std::size_t n);   // sqrt(pi/2) ln 2 / sqrt(n)
double ks_reference_opt(std::size_t n);  // 1 / (2n)

double ks_two_sample_statistic(std::span<const double> a, std::span<const double> b);
// Asymptotic p-value of the two-sample statistic.
double ks_two_sample_pvalue(double d, std::size_t na, std::size_t nb);

// ---------------------------------------------------------------------------
// Vector-wise Sobol' indices

struct SobolReport {
  std::vector<double> tau2;       // tau-bar^2_k, k = 1..K'
  std::vector<double> tau2_se;
  double sigma2 = 0.0;            // replicate variance of F
  double nu = 0.0;                // sum_k max(tau2_k, 0) / sigma2
  double nu_se = 0.0;             // jackknife over replicates
  std::size_t replicates = 0;
  std::string convention;         // which block one "column" refreshes

  std::vector<double> tau2_normalized() const;
};

// From R base values F(X^(r)) and an R x K' table of F(X^(r)_{-k} : X^{*(r)}_k).
SobolReport jansen_report(std::span<const double> base, const std::vector<std::vector<double>>& refreshed,
                          std::string convention = "step-block");

// F maps a randomization schedule (one seed per column block) to a value.
using ScheduleFunctional = std::function<double(std::span<const std::uint64_t>)>;

// tau-bar^2_k for a single column from R independent (X, X*_k) pairs.
double jansen_total_index(const ScheduleFunctional& F, std::size_t schedule_length, int k,
                          int replicates, std::uint64_t seed);

SobolReport jansen_indices(const ScheduleFunctional& F, std::size_t schedule_length, int kprime,
                           int replicates, std::uint64_t seed);

// WOS version: the refreshed runs resume from per-step snapshots. Replicates
// run in parallel over `threads` and the result does not depend on it.
SobolReport jansen_wos(const WalkEngine& engine, int kprime, int replicates, std::uint64_t seed,
                       int threads = 1);

double mean_dimension(const SobolReport& report);

// Test functionals built from per-step uniform vectors of length n:
// a_k = sqrt(12 n) (mean_i u_{k,i} - 1/2), which has mean 0 and variance 1.
double synthetic_column_score(std::uint64_t step_seed, std::size_t n);
// sum_k a_k over the first `columns` entries: mean dimension 1.
ScheduleFunctional synthetic_additive(std::size_t n, int columns);
// a_1 a_2: mean dimension 2.
ScheduleFunctional synthetic_product(std::size_t n);

}  // namespace arraywos
