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

#include "arraywos/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <omp.h>

#include "arraywos/rng.hpp"
#include "arraywos/samplers.hpp"

namespace arraywos {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

constexpr std::uint64_t kStarTag = 0x5a4f5354ULL;

std::vector<std::uint64_t> base_schedule(std::uint64_t seed, int r, std::size_t len) {
  return make_schedule(derive_seed(seed, static_cast<std::uint64_t>(r)), static_cast<int>(len));
}

std::vector<std::uint64_t> star_schedule(std::uint64_t seed, int r, std::size_t len) {
  return make_schedule(derive_seed(seed, {static_cast<std::uint64_t>(r), kStarTag}),
                       static_cast<int>(len));
}

}  // namespace

SampleStats sample_stats(std::span<const double> x) {
  SampleStats s;
  s.count = x.size();
  if (x.empty()) return s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  if (x.size() < 2) return s;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(x.size() - 1);
  s.se = std::sqrt(s.variance / static_cast<double>(x.size()));
  return s;
}

double mean_squared_error(std::span<const double> estimates, double truth) {
  if (estimates.empty()) fail("MSE of an empty sample");
  double ss = 0.0;
  for (double v : estimates) ss += (v - truth) * (v - truth);
  return ss / static_cast<double>(estimates.size());
}

LogLogFit fit_loglog(std::span<const std::pair<double, double>> points, double min_n) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& [n, v] : points) {
    if (n < min_n) continue;
    if (!(n > 0 && v > 0)) fail("log-log fit needs positive sample sizes and values");
    xy.emplace_back(std::log(n), std::log(v));
  }
  if (xy.size() < 2) fail("log-log fit needs at least two points with n >= " + std::to_string(min_n));
  double mx = 0, my = 0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) fail("log-log fit needs at least two distinct sample sizes");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.used = xy.size();
  return f;
}

Ratio reduction_factor(std::span<const double> method_values, std::span<const double> mc_values,
                       std::optional<double> truth) {
  if (method_values.size() < 2 || mc_values.size() < 2)
    fail("reduction factor needs at least two replicates per method");
  const double num = truth ? mean_squared_error(mc_values, *truth) : sample_stats(mc_values).variance;
  const double den =
      truth ? mean_squared_error(method_values, *truth) : sample_stats(method_values).variance;
  if (den == 0.0) fail("reduction factor with zero denominator");
  Ratio r;
  r.value = num / den;
  r.se = r.value * std::sqrt(2.0 / static_cast<double>(method_values.size() - 1) +
                             2.0 / static_cast<double>(mc_values.size() - 1));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

double check_disk_point(const Vec3& z) {
  const double rho = std::hypot(z[0], z[1]);
  if (!(rho < 1.0)) fail("Poisson kernel needs |z| < 1");
  return rho;
}

// CDF in the angle beta measured from the direction of z, for beta in
// [-pi, pi), extended by H(beta + 2 pi k) = H(beta) + k.
double exit_cdf_angle(double beta, double c) {
  const double k = std::floor((beta + std::numbers::pi) / kTwoPi);
  const double b = beta - kTwoPi * k;
  return 0.5 + std::atan2(c * std::sin(0.5 * b), std::cos(0.5 * b)) / std::numbers::pi + k;
}

}  // namespace

double poisson_kernel(const Vec3& z, double x) {
  const double rho = check_disk_point(z);
  const Vec3 d = z - theta(x);
  return (1.0 - rho * rho) / (d[0] * d[0] + d[1] * d[1]);
}

double poisson_cdf(const Vec3& z, double x) {
  const double rho = check_disk_point(z);
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double alpha = std::atan2(z[1], z[0]);
  const double c = (1.0 + rho) / (1.0 - rho);
  const double v = exit_cdf_angle(kTwoPi * x - alpha, c) - exit_cdf_angle(-alpha, c);
  return std::clamp(v, 0.0, 1.0);
}

double terminal_angle(const Vec3& p) {
  double t = std::atan2(p[1], p[0]) / kTwoPi;
  if (t < 0) t += 1.0;
  return t >= 1.0 ? 0.0 : t;
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) fail("KS distance of an empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance(std::span<const double> angles, const Vec3& z) {
  return ks_distance(angles, [&](double x) { return poisson_cdf(z, x); });
}

double ks_reference_mc(std::size_t n) {
  return std::sqrt(std::numbers::pi / 2.0) * std::numbers::ln2 / std::sqrt(static_cast<double>(n));
}

double ks_reference_opt(std::size_t n) { return 0.5 / static_cast<double>(n); }

double ks_two_sample_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail("two-sample KS needs nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_pvalue(double d, std::size_t na, std::size_t nb) {
  const double ne = static_cast<double>(na) * static_cast<double>(nb) / static_cast<double>(na + nb);
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

std::vector<double> SobolReport::tau2_normalized() const {
  std::vector<double> out(tau2.size());
  for (std::size_t k = 0; k < tau2.size(); ++k) out[k] = sigma2 > 0 ? tau2[k] / sigma2 : 0.0;
  return out;
}

SobolReport jansen_report(std::span<const double> base, const std::vector<std::vector<double>>& refreshed,
                          std::string convention) {
  const std::size_t R = base.size();
  if (R < 3) fail("Jansen estimator needs at least three replicates");
  if (refreshed.size() != R) fail("refreshed table must have one row per replicate");
  const std::size_t K = refreshed.front().size();
  if (K == 0) fail("Jansen estimator needs at least one column");

  // half squared differences, R x K
  std::vector<std::vector<double>> h(R, std::vector<double>(K));
  for (std::size_t r = 0; r < R; ++r) {
    if (refreshed[r].size() != K) fail("ragged refreshed table");
    for (std::size_t k = 0; k < K; ++k) {
      const double d = base[r] - refreshed[r][k];
      h[r][k] = 0.5 * d * d;
    }
  }
  SobolReport rep;
  rep.replicates = R;
  rep.convention = std::move(convention);
  rep.tau2.assign(K, 0.0);
  rep.tau2_se.assign(K, 0.0);
  std::vector<double> col(R);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t r = 0; r < R; ++r) col[r] = h[r][k];
    const SampleStats s = sample_stats(col);
    rep.tau2[k] = s.mean;
    rep.tau2_se[k] = s.se;
  }
  const SampleStats fs = sample_stats(base);
  rep.sigma2 = fs.variance;
  if (rep.sigma2 > 0) rep.nu = mean_dimension(rep);

  // Leave-one-out jackknife of nu.
  double sx = 0, sxx = 0;
  for (double v : base) {
    sx += v;
    sxx += v * v;
  }
  std::vector<double> colsum(K, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t k = 0; k < K; ++k) colsum[k] += h[r][k];
  std::vector<double> loo(R);
  const double m = static_cast<double>(R - 1);
  for (std::size_t r = 0; r < R; ++r) {
    const double lx = sx - base[r], lxx = sxx - base[r] * base[r];
    const double var = (lxx - lx * lx / m) / (m - 1);
    double t = 0;
    for (std::size_t k = 0; k < K; ++k) t += std::max((colsum[k] - h[r][k]) / m, 0.0);
    loo[r] = var > 0 ? t / var : 0.0;
  }
  const double lm = sample_stats(loo).mean;
  double js = 0;
  for (double v : loo) js += (v - lm) * (v - lm);
  rep.nu_se = std::sqrt(m / static_cast<double>(R) * js);
  return rep;
}

double jansen_total_index(const ScheduleFunctional& F, std::size_t schedule_length, int k,
                          int replicates, std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > schedule_length) fail("column index out of range");
  if (replicates < 1) fail("need at least one replicate");
  double sum = 0.0;
  for (int r = 0; r < replicates; ++r) {
    auto x = base_schedule(seed, r, schedule_length);
    const double a = F(x);
    x[k - 1] = star_schedule(seed, r, schedule_length)[k - 1];
    const double b = F(x);
    sum += 0.5 * (a - b) * (a - b);
  }
  return sum / replicates;
}

SobolReport jansen_indices(const ScheduleFunctional& F, std::size_t schedule_length, int kprime,
                           int replicates, std::uint64_t seed) {
  if (kprime < 1 || static_cast<std::size_t>(kprime) > schedule_length) fail("K' out of range");
  std::vector<double> base(replicates);
  std::vector<std::vector<double>> refreshed(replicates, std::vector<double>(kprime));
  for (int r = 0; r < replicates; ++r) {
    auto x = base_schedule(seed, r, schedule_length);
    const auto star = star_schedule(seed, r, schedule_length);
    base[r] = F(x);
    for (int k = 1; k <= kprime; ++k) {
      x[k - 1] = star[k - 1];
      refreshed[r][k - 1] = F(x);
      x[k - 1] = base_schedule(seed, r, schedule_length)[k - 1];
    }
  }
  return jansen_report(base, refreshed, "column");
}

SobolReport jansen_wos(const WalkEngine& engine, int kprime, int replicates, std::uint64_t seed,
                       int threads) {
  if (replicates < 3) fail("Jansen estimator needs at least three replicates");
  const std::size_t len = static_cast<std::size_t>(engine.max_steps());
  std::vector<double> base(replicates);
  std::vector<std::vector<double>> refreshed(replicates);
  std::string error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1))
  for (int r = 0; r < replicates; ++r) {
    try {
      const RefreshedRuns runs =
          refreshed_runs(engine, base_schedule(seed, r, len), star_schedule(seed, r, len), kprime);
      base[r] = runs.base;
      refreshed[r] = runs.refreshed;
    } catch (const std::exception& e) {
#pragma omp critical
      error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  const bool scalar = engine.layout().s() == 1;
  return jansen_report(base, refreshed, scalar ? "column" : "step-block");
}

double mean_dimension(const SobolReport& report) {
  if (!(report.sigma2 > 0)) fail("mean dimension undefined: F has zero variance");
  double t = 0;
  for (double v : report.tau2) t += std::max(v, 0.0);
  return t / report.sigma2;
}

double synthetic_column_score(std::uint64_t step_seed, std::size_t n) {
  SplitMix64 rng(step_seed);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += rng.uniform();
  const double nd = static_cast<double>(n);
  return std::sqrt(12.0 * nd) * (sum / nd - 0.5);
}

ScheduleFunctional synthetic_additive(std::size_t n, int columns) {
  return [n, columns](std::span<const std::uint64_t> x) {
    double f = 0.0;
    for (int k = 0; k < columns; ++k) f += synthetic_column_score(x[k], n);
    return f;
  };
}

ScheduleFunctional synthetic_product(std::size_t n) {
  return [n](std::span<const std::uint64_t> x) {
    return synthetic_column_score(x[0], n) * synthetic_column_score(x[1], n);
  };
}

}  // namespace arraywos
