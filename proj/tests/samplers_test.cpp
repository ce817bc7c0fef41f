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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "arraywos/rng.hpp"
#include "arraywos/samplers.hpp"

namespace arraywos {
namespace {

TEST(Samplers, Theta) {
  EXPECT_EQ(theta(0.0), (Vec3{1, 0, 0}));
  EXPECT_NEAR(theta(0.25)[0], 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(theta(0.25)[1], 1.0);
  EXPECT_DOUBLE_EQ(theta(0.5)[0], -1.0);
  EXPECT_NEAR(theta(0.5)[1], 0.0, 1e-15);
}

TEST(Samplers, HatBox) {
  const Vec3 eq = psi03(0.5, 0.0);
  EXPECT_DOUBLE_EQ(eq[0], 1.0);
  EXPECT_EQ(eq[2], 0.0);
  EXPECT_EQ(psi03(0.0, 0.3)[2], 1.0);
  EXPECT_NEAR(norm(psi03(0.0, 0.3)), 1.0, 1e-15);

  SplitMix64 rng(4);
  const int n = 100000;
  Vec3 mean{};
  std::vector<double> heights(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = psi03(rng.uniform(), rng.uniform());
    EXPECT_NEAR(norm(p), 1.0, 1e-12);
    mean = mean + (1.0 / n) * p;
    heights[i] = p[2];
  }
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(mean[c], 0.0, 0.01);
  // One-sample KS of the height against U[-1,1]; 1.95/sqrt(n) is the 0.1% level.
  std::sort(heights.begin(), heights.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = (heights[i] + 1.0) / 2.0;
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  EXPECT_LT(d, 1.95 / std::sqrt(n));
}

TEST(Samplers, DiskPoint) {
  const Vec3 p = psi12(0.25, 0.5);
  EXPECT_NEAR(p[0], -0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  const Vec3 edge = psi12(std::nextafter(1.0, 0.0), 0.0);
  EXPECT_NEAR(edge[0], 1.0, 1e-15);
  SplitMix64 rng(9);
  int inner = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) inner += norm(psi12(rng.uniform(), rng.uniform())) <= 0.5;
  EXPECT_NEAR(static_cast<double>(inner) / n, 0.25, 0.01);
}

TEST(Samplers, GreenFunctions) {
  EXPECT_EQ(green2(0.7, 0.7), 0.0);
  EXPECT_EQ(green3(0.7, 0.7), 0.0);
  EXPECT_NEAR(green2(1.0, std::exp(-1.0)), 1.0 / kTwoPi, 1e-15);
  EXPECT_NEAR(1.0 / kTwoPi, 0.159155, 1e-6);
  EXPECT_TRUE(std::isfinite(green2(1.0, 0.0)));
  EXPECT_TRUE(std::isfinite(green3(1.0, 0.0)));
}

// Average of vol * G over uniform points of the unit ball: the integral of G.
TEST(Samplers, GreenIntegrals) {
  SplitMix64 rng(12);
  const int n = 1000000;
  double s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 w = psi12(rng.uniform(), rng.uniform());
    s2 += ball_volume(2, 1.0) * green2(1.0, norm(w));
    // Uniform in the 3-ball: radius U^{1/3} on a uniform direction.
    const Vec3 dir = psi03(rng.uniform(), rng.uniform());
    const double rho = std::cbrt(rng.uniform());
    s3 += ball_volume(3, 1.0) * green3(1.0, norm(rho * dir));
  }
  EXPECT_NEAR(s2 / n, 0.25, 3e-3);
  EXPECT_NEAR(s3 / n, 1.0 / 6.0, 3e-3);
}

TEST(Samplers, SourceIncrement) {
  Scene s = unit_disk();
  EXPECT_THROW(constant_source_shortcut_increment(s, 1.0), std::logic_error);
  s.source.mode = SourceMode::General;
  s.source.value = 1.0;
  const Vec3 z{0.1, 0.2, 0};
  EXPECT_NEAR(source_increment(s, 0.3, z, z + Vec3{0.3, 0, 0}), 0.0, 1e-16);
  s.source.value = 0.0;
  EXPECT_EQ(source_increment(s, 0.3, z, z + Vec3{0.1, 0, 0}), 0.0);

  const Scene db = dumbbell();
  EXPECT_EQ(constant_source_shortcut_increment(db, 0.0), 0.0);
  EXPECT_EQ(constant_source_shortcut_increment(db, 1.0), 0.5);
}

TEST(Samplers, StepLayout) {
  EXPECT_EQ(StepInputLayout::for_scene(unit_disk()).s(), 1);
  EXPECT_EQ(StepInputLayout::for_scene(unit_ball()).s(), 2);
  EXPECT_EQ(StepInputLayout::for_scene(pacman()).s(), 3);
  EXPECT_EQ(StepInputLayout::for_scene(dumbbell()).s(), 1);
}

}  // namespace
}  // namespace arraywos
