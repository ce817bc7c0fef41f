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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arraywos/analysis.hpp"
#include "arraywos/geometry.hpp"
#include "arraywos/wos_engine.hpp"

namespace arraywos {

struct MethodSpec {
  Method method = Method::MC;
  Construction points = Construction::MC;
  InactiveVariant variant = InactiveVariant::MoveToEnd;

  std::string points_label() const;
  std::string label() const;  // "method/points/variant"
};

// Expands methods x constructions; MC-type methods ignore the construction.
std::vector<MethodSpec> expand_methods(const std::vector<Method>& methods,
                                       const std::vector<Construction>& points,
                                       InactiveVariant variant);

struct ExperimentConfig {
  std::string scene = "unit_disk";
  std::optional<Vec3> z0;
  std::vector<Method> methods{Method::MC};
  std::vector<Construction> points{Construction::Sobol};
  std::vector<std::size_t> ns{1024};
  int reps = 10;
  double eps = 0.0;
  InactiveVariant variant = InactiveVariant::MoveToEnd;
  bool fixed_k = false;
  int max_steps = 0;
  bool one_large_set = false;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;  // 0: all available cores
  bool timing = true;

  // Fields present in a JSON config file override the defaults; command-line
  // flags are applied afterwards by the caller.
  void merge_json_file(const std::filesystem::path& path);
};

std::uint64_t replicate_seed(std::uint64_t master, const MethodSpec& spec, std::size_t n, int replicate);

RunConfig make_run_config(const ExperimentConfig& cfg, const MethodSpec& spec, std::size_t n,
                          std::uint64_t seed);

struct ReplicateResult {
  MethodSpec spec;
  std::size_t n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  EstimateRecord record;
  double wall_ms = 0.0;
};

// Every (spec, n, replicate) task, run in parallel over replicates with
// serial kernels inside. Output order is fixed: spec, then n, then replicate.
// With keep_walkers = false the per-walker vectors are dropped.
std::vector<ReplicateResult> run_replicates(const Scene& scene, const ExperimentConfig& cfg,
                                            const std::vector<MethodSpec>& specs,
                                            bool keep_walkers = false);

int resolve_threads(int requested);

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v);

struct ResultRow {
  std::string scene, method, points, variant;
  std::size_t n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0, mean_steps = 0.0;
  std::uint32_t max_steps = 0;
  std::optional<double> wall_ms;
};

inline constexpr const char* kResultsHeader =
    "scene,method,points,variant,n,replicate,seed,estimate,mean_steps,max_steps,wall_ms";
inline constexpr const char* kRatesHeader =
    "scene,method,points,n,variance,mse,slope,intercept,vrf_vs_mc";
inline constexpr const char* kKsHeader = "t,method,points,n,mean_ks,se_ks,ref_mc,ref_opt";
inline constexpr const char* kSobolHeader =
    "scene,method,points,k,tau2,tau2_norm,sigma2,nu_partial";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<ResultRow> to_rows(const std::string& scene, const std::vector<ReplicateResult>& results,
                               bool timing);

// ---------------------------------------------------------------------------
// Reports

struct RateRow {
  std::string scene, method, points;
  std::optional<std::size_t> n;
  std::optional<double> variance, mse, slope, intercept, vrf_vs_mc;
};

// Groups results by (scene, method, points, n). The fit uses MSE when `truth`
// is known and variance otherwise; RQMC methods measured with both sobol and
// lattice points also get a pooled fit row (points "sobol+lattice").
std::vector<RateRow> rate_report(const std::vector<ResultRow>& rows, std::optional<double> truth);
void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows);
// One gnuplot data file per (method, points): n, variance, mse, fitted line.
void write_rate_plots(const std::filesystem::path& dir, const std::vector<ResultRow>& rows,
                      const std::vector<RateRow>& rates);

struct KsRow {
  double t = 0.0;
  std::string method, points;
  std::size_t n = 0;
  double mean_ks = 0.0, se_ks = 0.0, ref_mc = 0.0, ref_opt = 0.0;
};

std::vector<KsRow> ks_study(const ExperimentConfig& cfg, const std::vector<MethodSpec>& specs,
                            const std::vector<double>& ts);
void write_ks_csv(std::ostream& out, const std::vector<KsRow>& rows);

struct SobolRow {
  std::string scene, method, points;
  SobolReport report;
};

std::vector<SobolRow> sobol_study(const ExperimentConfig& cfg, const std::vector<MethodSpec>& specs,
                                  int kprime);
void write_sobol_csv(std::ostream& out, const std::vector<SobolRow>& rows);
// Mean dimensions laid out as base methods x {plain, array}.
void write_sobol_summary(std::ostream& out, const std::vector<SobolRow>& rows);

}  // namespace arraywos
