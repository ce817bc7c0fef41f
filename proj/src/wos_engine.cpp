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

#include "arraywos/wos_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "arraywos/kernels.hpp"
#include "arraywos/rng.hpp"

namespace arraywos {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

// Seed of column c within a step block. Column 0 is the sort column of the
// array methods.
std::uint64_t column_seed(std::uint64_t step_seed, std::size_t c) { return derive_seed(step_seed, c); }

double column_shift(std::uint64_t step_seed, std::size_t c) {
  return SplitMix64(column_seed(step_seed, c)).uniform();
}

std::vector<std::uint32_t> argsort_column(const PointMatrix& pts, std::size_t col) {
  std::vector<std::uint32_t> order(pts.rows());
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double x = pts(a, col), y = pts(b, col);
    return x < y || (x == y && a < b);
  });
  return order;
}

// Rows of `pts` in `order`, dropping the first `skip` columns.
PointMatrix gather_rows(const PointMatrix& pts, std::span<const std::uint32_t> order,
                        std::size_t skip) {
  PointMatrix out(order.size(), pts.cols() - skip);
  for (std::size_t j = 0; j < order.size(); ++j) {
    auto src = pts.row(order[j]);
    std::copy(src.begin() + skip, src.end(), out.row(j).begin());
  }
  return out;
}

PointMatrix fibonacci_rows(std::size_t count, double delta) {
  const int r = fibonacci_index_at_least(count);
  const std::uint64_t F = fibonacci_number(r), G = fibonacci_number(r - 1);
  PointMatrix out(count, 1);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    out(i, 0) = shift_mod1(static_cast<double>(v) / static_cast<double>(F), delta);
    v = (v + G) % F;
  }
  return out;
}

PointMatrix drop_first_column(const PointMatrix& pts) {
  std::vector<std::uint32_t> order(pts.rows());
  std::iota(order.begin(), order.end(), 0U);
  return gather_rows(pts, order, 1);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::MC: return "mc";
    case Method::RQMC: return "rqmc";
    case Method::ArrayRQMC: return "array-rqmc";
    case Method::ArrayMC: return "array-mc";
  }
  return "?";
}

std::string_view to_string(InactiveVariant v) {
  switch (v) {
    case InactiveVariant::MoveToEnd: return "move-to-end";
    case InactiveVariant::Interleave: return "interleave";
    case InactiveVariant::HammersleyOnFly: return "hammersley-onfly";
    case InactiveVariant::FibonacciOnFly: return "fibonacci-onfly";
    case InactiveVariant::StratifiedOnFly: return "stratified-onfly";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "mc") return Method::MC;
  if (s == "rqmc") return Method::RQMC;
  if (s == "array-rqmc" || s == "array") return Method::ArrayRQMC;
  if (s == "array-mc") return Method::ArrayMC;
  fail("unknown method '" + std::string(s) + "' (expected mc, rqmc, array-rqmc, array-mc)");
}

InactiveVariant parse_variant(std::string_view s) {
  if (s == "move-to-end") return InactiveVariant::MoveToEnd;
  if (s == "interleave") return InactiveVariant::Interleave;
  if (s == "hammersley-onfly") return InactiveVariant::HammersleyOnFly;
  if (s == "fibonacci-onfly") return InactiveVariant::FibonacciOnFly;
  if (s == "stratified-onfly") return InactiveVariant::StratifiedOnFly;
  fail("unknown variant '" + std::string(s) +
       "' (expected move-to-end, interleave, hammersley-onfly, fibonacci-onfly, stratified-onfly)");
}

int default_max_steps(StoppingMode mode, double epsilon) {
  if (mode == StoppingMode::FixedK) return 20;
  return 20 * static_cast<int>(std::ceil(std::log10(1.0 / epsilon) - 1e-9));
}

std::vector<std::uint64_t> make_schedule(std::uint64_t seed, int steps) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(std::max(steps, 0)));
  for (int k = 1; k <= steps; ++k) s[k - 1] = derive_seed(seed, static_cast<std::uint64_t>(k));
  return s;
}

StepResult wos_step(const Scene& scene, const StepInputLayout& layout, const Vec3& z, double r,
                    std::span<const double> x) {
  StepResult out;
  out.radius = r;
  const Vec3 dir = scene.dimension == 2 ? theta(x[0]) : psi03(x[0], x[1]);
  switch (scene.source.mode) {
    case SourceMode::None:
      break;
    case SourceMode::General: {
      const Vec3 w = z + r * psi12(x[layout.s0], x[layout.s0 + 1]);
      out.increment = source_increment(scene, r, z, w);
      break;
    }
    case SourceMode::ConstantShortcut:
      out.increment = constant_source_shortcut_increment(scene, r);
      break;
  }
  out.z = z + r * dir;
  return out;
}

StepResult wos_step(const Scene& scene, const StepInputLayout& layout, const Vec3& z,
                    std::span<const double> x) {
  return wos_step(scene, layout, z, scene.distance_to_boundary(z), x);
}

// ---------------------------------------------------------------------------

WalkEngine::WalkEngine(const Scene& scene, RunConfig config)
    : scene_(&scene), cfg_(config), hilbert_(HilbertConfig::for_dimension(scene.dimension)) {
  z0_ = cfg_.z0.value_or(scene.evaluation_point);
  eps_ = cfg_.epsilon > 0 ? cfg_.epsilon : scene.epsilon;
  K_ = cfg_.max_steps > 0 ? cfg_.max_steps : default_max_steps(cfg_.stopping, eps_);
  layout_ = StepInputLayout::for_scene(scene);
  const std::size_t s = static_cast<std::size_t>(layout_.s());
  const std::size_t n = cfg_.n;

  if (n == 0) fail("need at least one walker");
  if (n > (std::size_t{1} << 31)) fail("too many walkers");
  if (!(eps_ > 0)) fail("epsilon must be positive");
  if (!scene.contains(z0_)) fail("starting point is not inside the scene");

  const bool array = sorts();
  if (!array && cfg_.variant != InactiveVariant::MoveToEnd)
    fail("variant '" + std::string(to_string(cfg_.variant)) + "' needs an array method");
  if (cfg_.one_large_set &&
      !(cfg_.method == Method::ArrayRQMC &&
        (cfg_.points == Construction::Sobol || cfg_.points == Construction::KuoLattice) &&
        (cfg_.variant == InactiveVariant::MoveToEnd || cfg_.variant == InactiveVariant::Interleave)))
    fail("one-large-set mode needs array-rqmc with sobol or lattice points");

  const std::size_t total_dims = s * static_cast<std::size_t>(K_);
  switch (cfg_.method) {
    case Method::MC:
    case Method::ArrayMC:
      break;
    case Method::RQMC:
      if (cfg_.points == Construction::Sobol) {
        net_ = DigitalNet::sobol(n, total_dims);
      } else if (cfg_.points == Construction::KuoLattice) {
        if (total_dims > GeneratingVector::builtin().size())
          fail("s*K = " + std::to_string(total_dims) + " exceeds the lattice generating vector");
      } else {
        fail("rqmc supports sobol and lattice points");
      }
      break;
    case Method::ArrayRQMC: {
      const InactiveVariant v = cfg_.variant;
      const bool onfly = v != InactiveVariant::MoveToEnd && v != InactiveVariant::Interleave;
      if (v == InactiveVariant::FibonacciOnFly || v == InactiveVariant::StratifiedOnFly) {
        if (s != 1) fail("variant '" + std::string(to_string(v)) + "' needs one input per step");
      } else if (v == InactiveVariant::HammersleyOnFly && s > 3) {
        fail("hammersley points support at most 3 inputs per step");
      }
      if (onfly) break;
      const std::size_t cols = cfg_.one_large_set ? 1 + total_dims : 1 + s;
      switch (cfg_.points) {
        case Construction::Sobol:
          net_ = DigitalNet::sobol(n, cols);
          break;
        case Construction::KuoLattice:
          if (cols > GeneratingVector::builtin().size()) fail("lattice dimension too large");
          break;
        case Construction::Fibonacci:
          if (scene.dimension != 2 || s != 1) fail("fibonacci points need d = 2 without a source term");
          if (fibonacci_index_at_least(n) > kMaxFibonacciIndex) fail("n too large for fibonacci points");
          break;
        case Construction::Stratified:
          if (s != 1) fail("stratified points need one input per step");
          break;
        case Construction::Hammersley:
          if (s > 3) fail("hammersley points support at most 3 inputs per step");
          break;
        case Construction::MC:
          fail("array-rqmc needs a QMC construction; use array-mc for iid points");
      }
      break;
    }
  }
}

WalkerEnsemble WalkEngine::initial_ensemble() const {
  const std::size_t n = cfg_.n;
  WalkerEnsemble e;
  e.z.assign(n, z0_);
  e.active.assign(n, 1);
  e.payoff.assign(n, 0.0);
  e.source_sum.assign(n, 0.0);
  e.key.assign(n, 0);
  e.steps.assign(n, 0);
  e.id.resize(n);
  std::iota(e.id.begin(), e.id.end(), 0U);
  e.terminal.assign(n, Vec3{0, 0, 0});
  e.active_count = n;
  return e;
}

PointMatrix WalkEngine::prepare_rows(int k, std::uint64_t step_seed, std::size_t active,
                                     const WalkerEnsemble& e) const {
  const std::size_t n = cfg_.n;
  const std::size_t s = static_cast<std::size_t>(layout_.s());
  const bool par = cfg_.execution == Execution::Parallel;
  auto fill_net = [&](std::span<const std::uint64_t> cols, std::uint64_t seed, PointMatrix& out,
                      std::size_t col) {
    const DigitalScramble sc = DigitalScramble::random(seed);
    const auto scrambled = sc.scramble_columns(cols);
    if (par) kernels::omp::fill_net_column(scrambled, sc.shift(), out, col);
    else kernels::serial::fill_net_column(scrambled, sc.shift(), out, col);
  };
  auto fill_lat = [&](std::uint64_t z, double delta, PointMatrix& out, std::size_t col) {
    if (par) kernels::omp::fill_lattice_column(z, delta, out, col);
    else kernels::serial::fill_lattice_column(z, delta, out, col);
  };
  const std::size_t first = static_cast<std::size_t>(k - 1) * s;  // first global column of step k

  switch (cfg_.method) {
    case Method::MC: {
      PointMatrix rows(n, s);
      if (par) kernels::omp::fill_mc_rows(rows, step_seed, e.active);
      else kernels::serial::fill_mc_rows(rows, step_seed, e.active);
      return rows;
    }
    case Method::RQMC: {
      PointMatrix rows(n, s);
      for (std::size_t c = 0; c < s; ++c) {
        if (cfg_.points == Construction::Sobol)
          fill_net(net_->columns(first + c), column_seed(step_seed, c), rows, c);
        else
          fill_lat(GeneratingVector::builtin()[first + c], column_shift(step_seed, c), rows, c);
      }
      return rows;
    }
    case Method::ArrayMC: {
      PointMatrix pts(n, s + 1);
      if (par) kernels::omp::fill_mc_rows(pts, step_seed);
      else kernels::serial::fill_mc_rows(pts, step_seed);
      return gather_rows(pts, argsort_column(pts, 0), 1);
    }
    case Method::ArrayRQMC:
      break;
  }

  switch (cfg_.variant) {
    case InactiveVariant::HammersleyOnFly:
      return drop_first_column(hammersley(active, s + 1, step_seed).points);
    case InactiveVariant::FibonacciOnFly:
      return fibonacci_rows(active, column_shift(step_seed, 1));
    case InactiveVariant::StratifiedOnFly:
      return stratified_points(active, column_shift(step_seed, 1));
    case InactiveVariant::MoveToEnd:
    case InactiveVariant::Interleave:
      break;
  }

  switch (cfg_.points) {
    case Construction::Sobol: {
      if (cfg_.one_large_set) {
        PointMatrix pts(n, s);
        for (std::size_t c = 0; c < s; ++c)
          fill_net(net_->columns(1 + first + c), column_seed(step_seed, 1 + c), pts, c);
        return gather_rows(pts, e.row_order, 0);
      }
      PointMatrix pts(n, s + 1);
      for (std::size_t c = 0; c <= s; ++c) fill_net(net_->columns(c), column_seed(step_seed, c), pts, c);
      return gather_rows(pts, argsort_column(pts, 0), 1);
    }
    case Construction::KuoLattice: {
      // Column 0 would be i/n: already sorted, so rows stay in lattice order.
      PointMatrix rows(n, s);
      const GeneratingVector& gv = GeneratingVector::builtin();
      for (std::size_t c = 0; c < s; ++c) {
        const std::size_t g = cfg_.one_large_set ? 1 + first + c : 1 + c;
        fill_lat(gv[g], column_shift(step_seed, 1 + c), rows, c);
      }
      return rows;
    }
    case Construction::Fibonacci:
      return fibonacci_rows(n, column_shift(step_seed, 1));
    case Construction::Stratified:
      return stratified_points(n, column_shift(step_seed, 1));
    case Construction::Hammersley:
      return drop_first_column(hammersley(n, s + 1, step_seed).points);
    case Construction::MC:
      break;
  }
  fail("unsupported point construction");
}

void WalkEngine::check_schedule(std::span<const std::uint64_t> schedule) const {
  if (schedule.size() < static_cast<std::size_t>(K_))
    fail("randomization schedule has " + std::to_string(schedule.size()) + " entries, need " +
         std::to_string(K_));
}

void WalkEngine::update_keys(WalkerEnsemble& e) const {
  const bool push = cfg_.variant != InactiveVariant::Interleave;
  if (cfg_.execution == Execution::Parallel) kernels::omp::hilbert_keys(*scene_, hilbert_, e, push);
  else kernels::serial::hilbert_keys(*scene_, hilbert_, e, push);
}

void WalkEngine::sort_ensemble(WalkerEnsemble& e) const {
  const std::size_t n = e.size();
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0U);
  std::sort(p.begin(), p.end(), [&](std::uint32_t a, std::uint32_t b) {
    return e.key[a] < e.key[b] || (e.key[a] == e.key[b] && e.id[a] < e.id[b]);
  });
  auto permute = [&](auto& v) {
    auto old = v;
    for (std::size_t j = 0; j < n; ++j) v[j] = old[p[j]];
  };
  permute(e.z);
  permute(e.active);
  permute(e.payoff);
  permute(e.source_sum);
  permute(e.key);
  permute(e.steps);
  permute(e.id);
  permute(e.terminal);
}

void WalkEngine::step(WalkerEnsemble& e, std::span<const std::uint64_t> schedule) const {
  check_schedule(schedule);
  if (finished(e)) return;
  const int k = e.step + 1;
  const std::uint64_t seed = schedule[k - 1];
  const std::size_t m = e.active_count;
  e.active_counts.push_back(m);

  if (cfg_.one_large_set && k == 1) {
    // The sort column is drawn once, with the first step's randomization.
    PointMatrix col(cfg_.n, 1);
    if (cfg_.points == Construction::Sobol) {
      const DigitalScramble sc = DigitalScramble::random(column_seed(seed, 0));
      kernels::serial::fill_net_column(sc.scramble_columns(net_->columns(0)), sc.shift(), col, 0);
      e.row_order = argsort_column(col, 0);
    } else {
      e.row_order.resize(cfg_.n);
      std::iota(e.row_order.begin(), e.row_order.end(), 0U);
    }
  }

  const PointMatrix rows = prepare_rows(k, seed, m, e);
  std::size_t slots = cfg_.n;
  if (sorts() && cfg_.variant != InactiveVariant::Interleave) slots = m;

  kernels::StepContext ctx;
  ctx.scene = scene_;
  ctx.layout = layout_;
  ctx.epsilon = eps_;
  ctx.check_epsilon = cfg_.stopping == StoppingMode::Epsilon;
  ctx.last_step = k == K_;
  const std::size_t stopped = cfg_.execution == Execution::Parallel
                                  ? kernels::omp::advance_walkers(ctx, e, rows, slots)
                                  : kernels::serial::advance_walkers(ctx, e, rows, slots);
  e.active_count -= stopped;
  e.step = k;

  if (sorts() && !finished(e)) {
    update_keys(e);
    sort_ensemble(e);
  }
}

EstimateRecord WalkEngine::finish(const WalkerEnsemble& e) const {
  if (e.active_count != 0) throw std::logic_error("walk finished with active walkers");
  const std::size_t n = e.size();
  EstimateRecord r;
  r.payoffs.resize(n);
  r.terminal_points.resize(n);
  r.steps.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    r.payoffs[e.id[j]] = e.payoff[j];
    r.terminal_points[e.id[j]] = e.terminal[j];
    r.steps[e.id[j]] = e.steps[j];
  }
  double sum = 0.0;
  for (double y : r.payoffs) sum += y;
  r.estimate = sum / static_cast<double>(n);
  for (std::uint32_t t : r.steps) {
    r.total_steps += t;
    r.max_steps = std::max(r.max_steps, t);
  }
  r.mean_steps = static_cast<double>(r.total_steps) / static_cast<double>(n);
  r.active_counts = e.active_counts;
  return r;
}

EstimateRecord WalkEngine::run_from(WalkerEnsemble e, std::span<const std::uint64_t> schedule) const {
  check_schedule(schedule);
  while (!finished(e)) step(e, schedule);
  return finish(e);
}

EstimateRecord WalkEngine::run(std::span<const std::uint64_t> schedule) const {
  return run_from(initial_ensemble(), schedule);
}

// ---------------------------------------------------------------------------

namespace {

EstimateRecord run_as(const Scene& scene, RunConfig config, Method m) {
  config.method = m;
  return WalkEngine(scene, config).run();
}

}  // namespace

EstimateRecord run_mc_wos(const Scene& scene, RunConfig config) { return run_as(scene, config, Method::MC); }
EstimateRecord run_rqmc_wos(const Scene& scene, RunConfig config) { return run_as(scene, config, Method::RQMC); }
EstimateRecord run_array_rqmc_wos(const Scene& scene, RunConfig config) {
  return run_as(scene, config, Method::ArrayRQMC);
}
EstimateRecord run_array_mc_wos(const Scene& scene, RunConfig config) {
  return run_as(scene, config, Method::ArrayMC);
}

EstimateRecord run_with_schedule(const Scene& scene, const RunConfig& config,
                                 std::span<const std::uint64_t> schedule) {
  return WalkEngine(scene, config).run(schedule);
}

RefreshedRuns refreshed_runs(const WalkEngine& engine, std::span<const std::uint64_t> schedule,
                             std::span<const std::uint64_t> star, int kmax) {
  if (kmax < 1 || kmax > engine.max_steps()) fail("refreshed step index out of range");
  if (star.size() < static_cast<std::size_t>(kmax)) fail("star schedule too short");
  std::vector<WalkerEnsemble> snapshots;
  WalkerEnsemble e = engine.initial_ensemble();
  while (!engine.finished(e)) {
    if (e.step < kmax) snapshots.push_back(e);
    engine.step(e, schedule);
  }
  RefreshedRuns out;
  out.base = engine.finish(e).estimate;
  out.refreshed.assign(static_cast<std::size_t>(kmax), out.base);
  std::vector<std::uint64_t> sched(schedule.begin(), schedule.end());
  for (std::size_t k = 1; k <= snapshots.size(); ++k) {
    sched[k - 1] = star[k - 1];
    out.refreshed[k - 1] = engine.run_from(snapshots[k - 1], sched).estimate;
    sched[k - 1] = schedule[k - 1];
  }
  return out;
}

}  // namespace arraywos
