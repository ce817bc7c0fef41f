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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace arraywos {

// Discrete Hilbert curve on the 2^p x ... x 2^p grid in d = 2 or 3.
//
// d = 2 uses the classic U-shaped order-1 curve (0,0) -> (0,1) -> (1,1) -> (1,0)
// with the xy2d rotation rule. d = 3 uses Skilling's transpose construction
// with axis 0 as the most significant interleaved bit.
struct HilbertConfig {
  int d = 2;
  int p = 16;

  static HilbertConfig for_dimension(int d) { return d == 3 ? HilbertConfig{3, 10} : HilbertConfig{2, 16}; }

  std::string_view orientation() const { return d == 2 ? "xy2d-u" : "skilling-transpose"; }
  std::uint64_t key_count() const { return std::uint64_t{1} << (d * p); }
  void validate() const;
};

using HilbertCell = std::array<std::uint32_t, 3>;

std::uint64_t hilbert_encode(const HilbertCell& cell, const HilbertConfig& cfg);
HilbertCell hilbert_decode(std::uint64_t key, const HilbertConfig& cfg);

// h(z) = (encode(floor(z * 2^p)) + 1/2) / 2^(dp) for z in [0,1]^d; coordinates
// outside [0,1] are clamped, non-finite coordinates throw.
double hilbert_sort_key(std::span<const double> z, const HilbertConfig& cfg);

// Integer form of the same key, used by the sort kernels.
std::uint64_t hilbert_cell_key(std::span<const double> z, const HilbertConfig& cfg);

// Center of the cell decode(floor(t * 2^(dp))).
std::array<double, 3> hilbert_curve_point(double t, const HilbertConfig& cfg);

}  // namespace arraywos
