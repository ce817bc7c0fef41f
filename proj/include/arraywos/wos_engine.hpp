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
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "arraywos/geometry.hpp"
#include "arraywos/hilbert.hpp"
#include "arraywos/qmc_points.hpp"
#include "arraywos/samplers.hpp"

namespace arraywos {

enum class Method { MC, RQMC, ArrayRQMC, ArrayMC };
enum class InactiveVariant { MoveToEnd, Interleave, HammersleyOnFly, FibonacciOnFly, StratifiedOnFly };
enum class StoppingMode { Epsilon, FixedK };
enum class Execution { Serial, Parallel };

std::string_view to_string(Method m);
std::string_view to_string(InactiveVariant v);
Method parse_method(std::string_view s);
InactiveVariant parse_variant(std::string_view s);

struct RunConfig {
  Method method = Method::MC;
  Construction points = Construction::MC;
  std::optional<Vec3> z0;  // default: the scene's evaluation point
  double epsilon = 0.0;    // 0: the scene's epsilon
  int max_steps = 0;       // K; 0: default for the stopping mode
  std::size_t n = 1024;
  InactiveVariant variant = InactiveVariant::MoveToEnd;
  StoppingMode stopping = StoppingMode::Epsilon;
  bool one_large_set = false;
  std::uint64_t seed = 0;
  Execution execution = Execution::Serial;
};

// 20 * ceil(log10(1/eps)) in epsilon mode, 20 in fixed-K mode.
int default_max_steps(StoppingMode mode, double epsilon);

// schedule[k-1] seeds every randomization used in step k.
std::vector<std::uint64_t> make_schedule(std::uint64_t seed, int steps);

inline constexpr std::uint64_t kInactiveKey = std::numeric_limits<std::uint64_t>::max();

// Algorithm state, stored in the current sorted order: slot j holds walker id[j].
struct WalkerEnsemble {
  std::vector<Vec3> z;
  std::vector<char> active;
  std::vector<double> payoff;       // final Y once inactive
  std::vector<double> source_sum;   // accumulated source-term increments
  std::vector<std::uint64_t> key;   // Hilbert cell key, kInactiveKey when pushed to the end
  std::vector<std::uint32_t> steps; // moves made
  std::vector<std::uint32_t> id;
  std::vector<Vec3> terminal;       // projected boundary point once inactive
  std::vector<std::size_t> active_counts;  // m_k for each step taken
  std::vector<std::uint32_t> row_order;    // one-large-set row permutation
  int step = 0;                     // steps taken so far
  std::size_t active_count = 0;

  std::size_t size() const { return z.size(); }
};

struct EstimateRecord {
  double estimate = 0.0;
  std::vector<double> payoffs;         // by walker id
  std::vector<Vec3> terminal_points;   // by walker id
  std::vector<std::uint32_t> steps;    // by walker id
  std::vector<std::size_t> active_counts;
  std::uint64_t total_steps = 0;
  double mean_steps = 0.0;
  std::uint32_t max_steps = 0;
};

class WalkEngine {
 public:
  WalkEngine(const Scene& scene, RunConfig config);

  const Scene& scene() const { return *scene_; }
  const RunConfig& config() const { return cfg_; }
  int max_steps() const { return K_; }
  double epsilon() const { return eps_; }
  const Vec3& start() const { return z0_; }
  const StepInputLayout& layout() const { return layout_; }
  bool sorts() const { return cfg_.method == Method::ArrayRQMC || cfg_.method == Method::ArrayMC; }

  WalkerEnsemble initial_ensemble() const;
  bool finished(const WalkerEnsemble& e) const { return e.active_count == 0 || e.step >= K_; }

  // Takes step e.step + 1 with randomization schedule[e.step].
  void step(WalkerEnsemble& e, std::span<const std::uint64_t> schedule) const;

  EstimateRecord finish(const WalkerEnsemble& e) const;

  EstimateRecord run(std::span<const std::uint64_t> schedule) const;
  EstimateRecord run_from(WalkerEnsemble e, std::span<const std::uint64_t> schedule) const;
  EstimateRecord run() const { return run(make_schedule(cfg_.seed, K_)); }

  // Cube rows for step k (1-based), in slot order, for a given active count.
  // Exposed for tests.
  PointMatrix prepare_rows(int k, std::uint64_t step_seed, std::size_t active,
                           const WalkerEnsemble& e) const;

 private:
  void check_schedule(std::span<const std::uint64_t> schedule) const;
  void update_keys(WalkerEnsemble& e) const;
  void sort_ensemble(WalkerEnsemble& e) const;

  const Scene* scene_;
  RunConfig cfg_;
  Vec3 z0_{};
  double eps_ = 0;
  int K_ = 0;
  StepInputLayout layout_;
  HilbertConfig hilbert_;
  std::optional<DigitalNet> net_;   // Sobol' nets reused every step
};

// One WOS move from z with cube inputs x (layout.s() values): returns the new
// point and the source-term increment.
struct StepResult {
  Vec3 z;
  double increment = 0.0;
  double radius = 0.0;
};
StepResult wos_step(const Scene& scene, const StepInputLayout& layout, const Vec3& z,
                    std::span<const double> x);
// Same with the radius dist(z, boundary) already known.
StepResult wos_step(const Scene& scene, const StepInputLayout& layout, const Vec3& z, double r,
                    std::span<const double> x);

EstimateRecord run_mc_wos(const Scene& scene, RunConfig config);
EstimateRecord run_rqmc_wos(const Scene& scene, RunConfig config);
EstimateRecord run_array_rqmc_wos(const Scene& scene, RunConfig config);
EstimateRecord run_array_mc_wos(const Scene& scene, RunConfig config);
EstimateRecord run_with_schedule(const Scene& scene, const RunConfig& config,
                                 std::span<const std::uint64_t> schedule);

// Base estimate and, for each k = 1..kmax, the estimate with step k's
// randomization replaced by star[k-1]. Refreshed runs resume from a snapshot
// taken before step k, which gives the same values as rerunning from scratch.
struct RefreshedRuns {
  double base = 0.0;
  std::vector<double> refreshed;
};
RefreshedRuns refreshed_runs(const WalkEngine& engine, std::span<const std::uint64_t> schedule,
                             std::span<const std::uint64_t> star, int kmax);

}  // namespace arraywos
