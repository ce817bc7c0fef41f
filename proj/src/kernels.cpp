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

#include "arraywos/kernels.hpp"

#include <omp.h>

#include <bit>
#include <cstdint>

#include "arraywos/rng.hpp"

namespace arraywos::kernels {

namespace {

// Per-walker body shared by both versions. Returns 1 if the walker stopped.
inline int advance_one(const StepContext& ctx, WalkerEnsemble& e, std::size_t j,
                       std::span<const double> x) {
  const Scene& scene = *ctx.scene;
  Vec3& z = e.z[j];
  bool stop = false;
  const double r = scene.distance_to_boundary(z);
  if (ctx.check_epsilon && r < ctx.epsilon) {
    stop = true;
  } else {
    const StepResult s = wos_step(scene, ctx.layout, z, r, x);
    e.source_sum[j] += s.increment;
    z = s.z;
    ++e.steps[j];
    stop = ctx.last_step;
  }
  if (!stop) return 0;
  const Projection p = scene.project_to_boundary(z);
  e.terminal[j] = p.point;
  e.payoff[j] = scene.boundary_value_on(p.primitive, p.point) + e.source_sum[j];
  z = p.point;
  e.active[j] = 0;
  return 1;
}

inline std::uint64_t cell_key(const Scene& scene, const HilbertConfig& cfg, const Vec3& z) {
  const Vec3 u = scene.to_unit_cube(z);
  return hilbert_cell_key(std::span<const double>(u.data(), 3), cfg);
}

}  // namespace

namespace serial {

void fill_net_column(std::span<const std::uint64_t> cols, std::uint64_t shift, PointMatrix& out,
                     std::size_t col) {
  const std::size_t n = out.rows();
  std::uint64_t v = shift;
  out(0, col) = digits_to_unit(v);
  for (std::size_t i = 1; i < n; ++i) {
    v ^= cols[std::countr_zero(i)];
    out(i ^ (i >> 1), col) = digits_to_unit(v);
  }
}

void fill_lattice_column(std::uint64_t z, double delta, PointMatrix& out, std::size_t col) {
  const std::size_t n = out.rows();
  const auto nd = static_cast<double>(n);
  z %= n;
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out(i, col) = shift_mod1(static_cast<double>(r) / nd, delta);
    r += z;
    if (r >= n) r -= n;
  }
}

void fill_mc_rows(PointMatrix& out, std::uint64_t seed, std::span<const char> mask) {
  for (std::size_t i = 0; i < out.rows(); ++i)
    if (mask.empty() || mask[i]) fill_uniform_row(out.row(i), derive_seed(seed, i));
}

void hilbert_keys(const Scene& scene, const HilbertConfig& cfg, WalkerEnsemble& e,
                  bool push_inactive) {
  for (std::size_t j = 0; j < e.size(); ++j)
    e.key[j] = (push_inactive && !e.active[j]) ? kInactiveKey : cell_key(scene, cfg, e.z[j]);
}

std::size_t advance_walkers(const StepContext& ctx, WalkerEnsemble& e, const PointMatrix& rows,
                            std::size_t slots) {
  std::size_t stopped = 0;
  for (std::size_t j = 0; j < slots; ++j)
    if (e.active[j]) stopped += advance_one(ctx, e, j, rows.row(j));
  return stopped;
}

}  // namespace serial

namespace omp {

void fill_net_column(std::span<const std::uint64_t> cols, std::uint64_t shift, PointMatrix& out,
                     std::size_t col) {
  // Each thread seeds its chunk of the Gray-code walk directly, then steps.
  const std::size_t n = out.rows();
#pragma omp parallel
  {
    const auto threads = static_cast<std::size_t>(omp_get_num_threads());
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t lo = n * t / threads, hi = n * (t + 1) / threads;
    if (lo < hi) {
      std::uint64_t v = net_point_digits(cols, shift, lo ^ (lo >> 1));
      out(lo ^ (lo >> 1), col) = digits_to_unit(v);
      for (std::size_t i = lo + 1; i < hi; ++i) {
        v ^= cols[std::countr_zero(i)];
        out(i ^ (i >> 1), col) = digits_to_unit(v);
      }
    }
  }
}

void fill_lattice_column(std::uint64_t z, double delta, PointMatrix& out, std::size_t col) {
  const std::uint64_t n = out.rows();
  const auto nd = static_cast<double>(n);
  z %= n;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const auto r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(i) * z) % n);
    out(i, col) = shift_mod1(static_cast<double>(r) / nd, delta);
  }
}

void fill_mc_rows(PointMatrix& out, std::uint64_t seed, std::span<const char> mask) {
  const auto n = static_cast<std::int64_t>(out.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    if (mask.empty() || mask[i]) fill_uniform_row(out.row(i), derive_seed(seed, i));
}

void hilbert_keys(const Scene& scene, const HilbertConfig& cfg, WalkerEnsemble& e,
                  bool push_inactive) {
  const auto n = static_cast<std::int64_t>(e.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j)
    e.key[j] = (push_inactive && !e.active[j]) ? kInactiveKey : cell_key(scene, cfg, e.z[j]);
}

std::size_t advance_walkers(const StepContext& ctx, WalkerEnsemble& e, const PointMatrix& rows,
                            std::size_t slots) {
  std::int64_t stopped = 0;
  const auto m = static_cast<std::int64_t>(slots);
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : stopped)
  for (std::int64_t j = 0; j < m; ++j)
    if (e.active[j]) stopped += advance_one(ctx, e, j, rows.row(j));
  return static_cast<std::size_t>(stopped);
}

}  // namespace omp

}  // namespace arraywos::kernels
