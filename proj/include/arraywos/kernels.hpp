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

// Inner loops of one WOS step. Each kernel has a serial reference version and
// an OpenMP version; both produce bit-identical output.

#include <cstddef>
#include <cstdint>
#include <span>

#include "arraywos/geometry.hpp"
#include "arraywos/hilbert.hpp"
#include "arraywos/qmc_points.hpp"
#include "arraywos/samplers.hpp"
#include "arraywos/wos_engine.hpp"

namespace arraywos::kernels {

struct StepContext {
  const Scene* scene = nullptr;
  StepInputLayout layout;
  double epsilon = 0.0;
  bool check_epsilon = true;  // false in fixed-K mode
  bool last_step = false;     // project every walker after moving
};

namespace serial {

// Column `col` of `out` gets point i of the scrambled net, i = 0..rows-1
// (rows must equal the net size). Gray-code order.
void fill_net_column(std::span<const std::uint64_t> cols, std::uint64_t shift, PointMatrix& out,
                     std::size_t col);
void fill_lattice_column(std::uint64_t z, double delta, PointMatrix& out, std::size_t col);
// Row i from stream derive_seed(seed, i); rows with mask[i] == 0 are skipped
// when a mask is given.
void fill_mc_rows(PointMatrix& out, std::uint64_t seed, std::span<const char> mask = {});
void hilbert_keys(const Scene& scene, const HilbertConfig& cfg, WalkerEnsemble& e,
                  bool push_inactive);
// Moves or finalizes the active walkers in slots [0, slots) using row j for
// slot j. Returns the number of walkers finalized.
std::size_t advance_walkers(const StepContext& ctx, WalkerEnsemble& e, const PointMatrix& rows,
                            std::size_t slots);

}  // namespace serial

namespace omp {

void fill_net_column(std::span<const std::uint64_t> cols, std::uint64_t shift, PointMatrix& out,
                     std::size_t col);
void fill_lattice_column(std::uint64_t z, double delta, PointMatrix& out, std::size_t col);
void fill_mc_rows(PointMatrix& out, std::uint64_t seed, std::span<const char> mask = {});
void hilbert_keys(const Scene& scene, const HilbertConfig& cfg, WalkerEnsemble& e,
                  bool push_inactive);
std::size_t advance_walkers(const StepContext& ctx, WalkerEnsemble& e, const PointMatrix& rows,
                            std::size_t slots);

}  // namespace omp

}  // namespace arraywos::kernels
