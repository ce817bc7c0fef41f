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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "arraywos/geometry.hpp"

namespace arraywos {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform directions and ball points from cube inputs.

inline Vec3 theta(double x) { return {std::cos(kTwoPi * x), std::sin(kTwoPi * x), 0.0}; }

// Hat-box map: the height is uniform on [-1, 1], north pole at x1 = 0.
inline Vec3 psi03(double x1, double x2) {
  const double z = 1.0 - 2.0 * x1;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(kTwoPi * x2), rho * std::sin(kTwoPi * x2), z};
}

inline Vec3 psi12(double x1, double x2) {
  const double r = std::sqrt(x1);
  return {r * std::cos(kTwoPi * x2), r * std::sin(kTwoPi * x2), 0.0};
}

inline constexpr double kMinGreenDistance = 1e-300;

inline double green2(double r, double rho) {
  return std::log(r / std::max(rho, kMinGreenDistance)) / kTwoPi;
}

inline double green3(double r, double rho) {
  return (1.0 / std::max(rho, kMinGreenDistance) - 1.0 / r) / (2.0 * kTwoPi);
}

inline double ball_volume(int d, double r) {
  return d == 2 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
}

// Cube inputs consumed per step: s0 for the sphere direction, s1 for the
// source point in the ball (0 without a general source term).
struct StepInputLayout {
  int s0 = 1;
  int s1 = 0;

  int s() const { return s0 + s1; }

  static StepInputLayout for_scene(const Scene& scene) {
    StepInputLayout l;
    l.s0 = scene.dimension - 1;
    if (scene.source.mode == SourceMode::General) {
      if (scene.dimension != 2) throw std::invalid_argument("general source terms need d = 2");
      l.s1 = 2;
    }
    return l;
  }
};

// -vol(B_d(r)) G_d(r, |w - z|) g(w): one summand of the source-term estimator.
inline double source_increment(const Scene& scene, double r, const Vec3& z, const Vec3& w) {
  const double rho = norm(w - z);
  const double g = scene.source_value(w);
  const double G = scene.dimension == 2 ? green2(r, rho) : green3(r, rho);
  return -ball_volume(scene.dimension, r) * G * g;
}

// For a constant source c this is the exact conditional mean of the summand
// above: -c r^2 / (2d), r^2/2 when c = -2 in the plane.
inline double constant_source_shortcut_increment(const Scene& scene, double r) {
  if (scene.source.mode != SourceMode::ConstantShortcut)
    throw std::logic_error("scene does not use the constant-source shortcut");
  return -scene.source.constant() * r * r / (2.0 * scene.dimension);
}

}  // namespace arraywos
