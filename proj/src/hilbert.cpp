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

#include "arraywos/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace arraywos {

void HilbertConfig::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("Hilbert dimension must be 2 or 3");
  if (p < 1 || d * p > 62)
    throw std::invalid_argument("Hilbert resolution p=" + std::to_string(p) + " out of range");
}

namespace {

std::uint64_t encode2(std::uint64_t x, std::uint64_t y, int p) {
  std::uint64_t d = 0;
  for (std::uint64_t s = std::uint64_t{1} << (p - 1); s > 0; s >>= 1) {
    const std::uint64_t rx = (x & s) > 0;
    const std::uint64_t ry = (y & s) > 0;
    d += s * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - (x & (s - 1)) + (x & ~(s - 1));
        y = s - 1 - (y & (s - 1)) + (y & ~(s - 1));
      }
      std::swap(x, y);
    }
  }
  return d;
}

void decode2(std::uint64_t d, int p, std::uint64_t& x, std::uint64_t& y) {
  x = y = 0;
  const std::uint64_t n = std::uint64_t{1} << p;
  for (std::uint64_t s = 1; s < n; s *= 2) {
    const std::uint64_t rx = 1 & (d / 2);
    const std::uint64_t ry = 1 & (d ^ rx);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
    x += s * rx;
    y += s * ry;
    d /= 4;
  }
}

// Skilling, "Programming the Hilbert curve" (2004).
void axes_to_transpose(std::uint32_t* X, int b, int n) {
  const std::uint32_t M = 1U << (b - 1);
  for (std::uint32_t Q = M; Q > 1; Q >>= 1) {
    const std::uint32_t P = Q - 1;
    for (int i = 0; i < n; ++i) {
      if (X[i] & Q) {
        X[0] ^= P;
      } else {
        const std::uint32_t t = (X[0] ^ X[i]) & P;
        X[0] ^= t;
        X[i] ^= t;
      }
    }
  }
  for (int i = 1; i < n; ++i) X[i] ^= X[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t Q = M; Q > 1; Q >>= 1)
    if (X[n - 1] & Q) t ^= Q - 1;
  for (int i = 0; i < n; ++i) X[i] ^= t;
}

void transpose_to_axes(std::uint32_t* X, int b, int n) {
  const std::uint32_t N = 2U << (b - 1);
  std::uint32_t t = X[n - 1] >> 1;
  for (int i = n - 1; i > 0; --i) X[i] ^= X[i - 1];
  X[0] ^= t;
  for (std::uint32_t Q = 2; Q != N; Q <<= 1) {
    const std::uint32_t P = Q - 1;
    for (int i = n - 1; i >= 0; --i) {
      if (X[i] & Q) {
        X[0] ^= P;
      } else {
        t = (X[0] ^ X[i]) & P;
        X[0] ^= t;
        X[i] ^= t;
      }
    }
  }
}

std::uint64_t interleave(const std::uint32_t* X, int b, int n) {
  std::uint64_t key = 0;
  for (int bit = b - 1; bit >= 0; --bit)
    for (int i = 0; i < n; ++i) key = (key << 1) | ((X[i] >> bit) & 1U);
  return key;
}

void deinterleave(std::uint64_t key, std::uint32_t* X, int b, int n) {
  for (int i = 0; i < n; ++i) X[i] = 0;
  for (int bit = 0; bit < b; ++bit)
    for (int i = n - 1; i >= 0; --i) {
      X[i] |= static_cast<std::uint32_t>(key & 1U) << bit;
      key >>= 1;
    }
}

}  // namespace

std::uint64_t hilbert_encode(const HilbertCell& cell, const HilbertConfig& cfg) {
  cfg.validate();
  const std::uint64_t side = std::uint64_t{1} << cfg.p;
  for (int i = 0; i < cfg.d; ++i)
    if (cell[i] >= side) throw std::out_of_range("Hilbert cell coordinate out of range");
  if (cfg.d == 2) return encode2(cell[0], cell[1], cfg.p);
  std::uint32_t X[3] = {cell[0], cell[1], cell[2]};
  axes_to_transpose(X, cfg.p, 3);
  return interleave(X, cfg.p, 3);
}

HilbertCell hilbert_decode(std::uint64_t key, const HilbertConfig& cfg) {
  cfg.validate();
  if (key >= cfg.key_count()) throw std::out_of_range("Hilbert key out of range");
  HilbertCell cell{0, 0, 0};
  if (cfg.d == 2) {
    std::uint64_t x = 0, y = 0;
    decode2(key, cfg.p, x, y);
    cell[0] = static_cast<std::uint32_t>(x);
    cell[1] = static_cast<std::uint32_t>(y);
    return cell;
  }
  std::uint32_t X[3];
  deinterleave(key, X, cfg.p, 3);
  transpose_to_axes(X, cfg.p, 3);
  return {X[0], X[1], X[2]};
}

std::uint64_t hilbert_cell_key(std::span<const double> z, const HilbertConfig& cfg) {
  const double side = std::ldexp(1.0, cfg.p);
  const auto top = static_cast<std::uint32_t>((std::uint64_t{1} << cfg.p) - 1);
  HilbertCell cell{0, 0, 0};
  for (int i = 0; i < cfg.d; ++i) {
    const double v = z[i];
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate in Hilbert key");
    const double c = std::floor(std::clamp(v, 0.0, 1.0) * side);
    cell[i] = std::min(static_cast<std::uint32_t>(c), top);
  }
  return hilbert_encode(cell, cfg);
}

double hilbert_sort_key(std::span<const double> z, const HilbertConfig& cfg) {
  return (static_cast<double>(hilbert_cell_key(z, cfg)) + 0.5) /
         static_cast<double>(cfg.key_count());
}

std::array<double, 3> hilbert_curve_point(double t, const HilbertConfig& cfg) {
  cfg.validate();
  const double count = static_cast<double>(cfg.key_count());
  auto key = static_cast<std::uint64_t>(std::floor(std::clamp(t, 0.0, 1.0) * count));
  key = std::min(key, cfg.key_count() - 1);
  const HilbertCell cell = hilbert_decode(key, cfg);
  const double side = std::ldexp(1.0, cfg.p);
  std::array<double, 3> out{0, 0, 0};
  for (int i = 0; i < cfg.d; ++i) out[i] = (cell[i] + 0.5) / side;
  return out;
}

}  // namespace arraywos
