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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "arraywos/geometry.hpp"
#include "arraywos/rng.hpp"

namespace arraywos {
namespace {

constexpr double kPi = std::numbers::pi;

// Distance by dense sampling of every primitive; an upper bound that
// converges to the true distance.
double sampled_distance(const Scene& s, const Vec3& z, int samples) {
  double best = INFINITY;
  for (const auto& p : s.primitives) {
    for (int i = 0; i < samples; ++i) {
      const double u = (i + 0.5) / samples;
      if (s.dimension == 3) {
        for (int j = 0; j < samples; ++j) best = std::min(best, norm(p.sample(u, (j + 0.5) / samples) - z));
      } else {
        best = std::min(best, norm(p.sample(u) - z));
      }
    }
  }
  return best;
}

Vec3 random_interior(const Scene& s, SplitMix64& rng) {
  for (;;) {
    Vec3 z{};
    for (int i = 0; i < s.dimension; ++i) z[i] = s.bbox_lo[i] + (s.bbox_hi[i] - s.bbox_lo[i]) * rng.uniform();
    if (s.contains(z)) return z;
  }
}

TEST(Geometry, DistanceExamples) {
  EXPECT_DOUBLE_EQ(unit_disk().distance_to_boundary({0, 0.5, 0}), 0.5);
  EXPECT_NEAR(unit_ball().distance_to_boundary({0.2, 0.3, -0.1}), 1.0 - std::sqrt(0.14), 1e-15);
  EXPECT_NEAR(dumbbell().distance_to_boundary({0.5, 0, 0}), 0.4, 1e-15);
}

TEST(Geometry, DistanceMatchesDenseSampling) {
  SplitMix64 rng(21);
  for (const std::string name : {"unit_disk", "pacman", "dumbbell", "gasket"}) {
    const Scene s = builtin_scene(name);
    for (int i = 0; i < 40; ++i) {
      const Vec3 z = random_interior(s, rng);
      const double d = s.distance_to_boundary(z);
      const double approx = sampled_distance(s, z, 4000);
      EXPECT_LE(d, approx + 1e-12) << name;
      EXPECT_NEAR(d, approx, 2e-3) << name;
    }
  }
  const Scene ball = unit_ball();
  for (int i = 0; i < 20; ++i) {
    const Vec3 z = random_interior(ball, rng);
    EXPECT_NEAR(ball.distance_to_boundary(z), sampled_distance(ball, z, 300), 2e-2);
  }
}

TEST(Geometry, ProjectionExamples) {
  const auto p = unit_disk().project_to_boundary({0, 0.5, 0});
  EXPECT_NEAR(p.point[0], 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(p.point[1], 1.0);
  const Scene pm = pacman();
  const auto q = pm.project_to_boundary({0.5, 0.01, 0});
  EXPECT_EQ(pm.primitives[q.primitive].label, "edge_theta0");
  EXPECT_DOUBLE_EQ(q.point[0], 0.5);
  EXPECT_EQ(q.point[1], 0.0);
}

TEST(Geometry, ProjectionIsIdempotentAndOnBoundary) {
  SplitMix64 rng(8);
  for (const std::string name : {"unit_disk", "unit_ball", "pacman", "dumbbell", "gasket"}) {
    const Scene s = builtin_scene(name);
    for (int i = 0; i < 200; ++i) {
      const Vec3 z = random_interior(s, rng);
      const auto p = s.project_to_boundary(z);
      EXPECT_NEAR(p.distance, s.distance_to_boundary(z), 1e-14) << name;
      EXPECT_NEAR(norm(p.point - z), p.distance, 1e-12) << name;
      EXPECT_LT(s.distance_to_boundary(p.point), 1e-12) << name;
      const auto again = s.project_to_boundary(p.point);
      EXPECT_LT(norm(again.point - p.point), 1e-12) << name;
    }
  }
}

TEST(Geometry, BoundaryValues) {
  EXPECT_DOUBLE_EQ(unit_disk().boundary_value({1, 0, 0}), 0.0);
  const Scene pm = pacman();
  EXPECT_NEAR(pm.boundary_value({1, 0, 0}), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(pm.boundary_value_on(0, {1, 0, 0}), pm.boundary_value_on(1, {1, 0, 0}), 1e-15);
  const Scene g = gasket();
  for (std::size_t i = 0; i < g.primitives.size(); ++i) {
    if (g.primitives[i].label != "bore") continue;
    EXPECT_EQ(g.boundary_value(g.primitives[i].sample(0.3)), 160.0);
  }
  EXPECT_THROW(unit_disk().boundary_value({0, 0, 0}), std::invalid_argument);
}

TEST(Geometry, SourceValues) {
  const Scene pm = pacman();
  EXPECT_DOUBLE_EQ(pm.source_value({0, 0, 0}), -2.0);
  EXPECT_NEAR(pm.source_value({1, 1, 0}), 0.0, 1e-15);
  const Scene db = dumbbell();
  EXPECT_EQ(db.source_value({0.3, 0.1, 0}), -2.0);
  EXPECT_FALSE(unit_disk().has_source());
}

TEST(Geometry, UnitCubeMap) {
  const Scene d = unit_disk();
  EXPECT_EQ(d.to_unit_cube({0, 0, 0}), (Vec3{0.5, 0.5, 0}));
  EXPECT_EQ(d.to_unit_cube({-1, -1, 0}), (Vec3{0, 0, 0}));
  const Scene db = dumbbell();
  EXPECT_EQ(db.bbox_lo, (Vec3{-2.5, -1, 0}));
  const Vec3 c = db.to_unit_cube({2.5, 1, 0});
  EXPECT_EQ(c[0], 1.0);
  EXPECT_EQ(c[1], 1.0);
}

TEST(Geometry, ExactSolutions) {
  EXPECT_NEAR(unit_disk().exact_solution({0, 0.5, 0}), 0.5 * std::log(4.25), 1e-15);
  EXPECT_NEAR(0.5 * std::log(4.25), 0.7234594, 1e-7);
  EXPECT_NEAR(unit_ball().exact_solution({0.2, 0.3, -0.1}), 1.0 / std::sqrt(3.34), 1e-15);
  EXPECT_NEAR(1.0 / std::sqrt(3.34), 0.547176, 1e-6);
  const Scene pm = pacman();
  const double r = 0.1244, t = -0.7906;
  EXPECT_NEAR(pm.exact_solution(pm.evaluation_point), std::cbrt(r) * std::sin(t / 3) + std::exp(-r * r / 2), 1e-14);
  EXPECT_FALSE(gasket().has_exact_solution());
  EXPECT_FALSE(dumbbell().has_exact_solution());
  EXPECT_THROW(gasket().exact_solution({0, 0, 0}), std::logic_error);
}

TEST(Geometry, Containment) {
  const Scene pm = pacman();
  EXPECT_TRUE(pm.contains(pm.evaluation_point));
  EXPECT_FALSE(pm.contains({0.5, 0.5, 0}));  // inside the mouth
  EXPECT_TRUE(pm.contains({-0.5, 0.5, 0}));
  const Scene g = gasket();
  EXPECT_TRUE(g.contains(g.evaluation_point));
  EXPECT_FALSE(g.contains({-0.679, 0.0, 0}));  // bore centre
  EXPECT_TRUE(unit_ball().contains({0.2, 0.3, -0.1}));
  EXPECT_FALSE(unit_ball().contains({0.8, 0.8, 0}));
}

TEST(Geometry, ArcDistanceUsesEndpointsOutsideRange) {
  const auto arc = BoundaryPrimitive::arc({0, 0, 0}, 1.0, 0.0, kPi / 2, "a");
  EXPECT_NEAR(arc.distance({0.5, 0.5, 0}), 1.0 - std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(arc.distance({-1, 0, 0}), std::sqrt(2.0), 1e-15);  // nearest is the endpoint (0,1)
  EXPECT_NEAR(arc.distance({0, 0, 0}), 1.0, 1e-15);
}

TEST(Scenes, DumbbellHasFourPrimitives) { EXPECT_EQ(dumbbell().primitives.size(), 4u); }

TEST(Scenes, GasketHasOuterBoundaryAndFiftyHoles) {
  const Scene g = gasket();
  ASSERT_EQ(g.primitives.size(), 51u);
  int holes = 0;
  for (const auto& p : g.primitives) holes += p.kind == PrimitiveKind::Circle;
  EXPECT_EQ(holes, 50);
  EXPECT_EQ(g.primitives[0].kind, PrimitiveKind::Polyline);
  EXPECT_EQ(g.epsilon, 1e-3);
  EXPECT_EQ(g.evaluation_point, (Vec3{0.240999, 0.3, 0}));
}

TEST(Scenes, UnknownSceneListsKnownNames) {
  try {
    builtin_scene("teapot");
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const auto& n : builtin_scene_names()) EXPECT_NE(msg.find(n), std::string::npos) << n;
  }
  EXPECT_THROW(resolve_scene("no/such/scene.json"), std::invalid_argument);
}

TEST(Scenes, JsonRoundTripPreservesQueries) {
  SplitMix64 rng(1);
  for (const auto& name : builtin_scene_names()) {
    const Scene s = builtin_scene(name);
    const Scene back = scene_from_json(scene_to_json(s));
    EXPECT_EQ(back.primitives.size(), s.primitives.size()) << name;
    EXPECT_EQ(back.evaluation_point, s.evaluation_point) << name;
    EXPECT_EQ(back.epsilon, s.epsilon) << name;
    EXPECT_EQ(back.has_exact_solution(), s.has_exact_solution()) << name;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 z = random_interior(s, rng);
      EXPECT_EQ(back.distance_to_boundary(z), s.distance_to_boundary(z)) << name;
      const auto p = s.project_to_boundary(z);
      EXPECT_EQ(back.boundary_value(p.point), s.boundary_value(p.point)) << name;
      if (s.has_source()) EXPECT_EQ(back.source_value(z), s.source_value(z)) << name;
    }
  }
}

TEST(Scenes, LoadsSceneFile) {
  const auto path = std::filesystem::temp_directory_path() / "arraywos_disk_scene.json";
  {
    std::ofstream f(path);
    f << scene_to_json(unit_disk());
  }
  const Scene s = resolve_scene(path.string());
  EXPECT_EQ(s.name, "unit_disk");
  const Scene g = gasket_from_file(std::string(ARRAYWOS_DATA_DIR) + "/gasket.json");
  EXPECT_EQ(g.primitives.size(), 51u);
  std::filesystem::remove(path);
}

TEST(Scenes, MalformedJsonIsRejected) {
  EXPECT_THROW(scene_from_json("{"), std::invalid_argument);
  EXPECT_THROW(scene_from_json(R"({"name":"x","dimension":2,"primitives":[]})"), std::invalid_argument);
  // Evaluation point outside the domain.
  EXPECT_THROW(scene_from_json(R"({"name":"x","dimension":2,"bbox":[[-1,-1],[1,1]],
      "primitives":[{"kind":"circle","params":{"center":[0,0],"radius":1},"label":"c"}],
      "boundary_values":{"c":0},"evaluation_point":[2,0],"epsilon":1e-4})"),
               std::invalid_argument);
}

TEST(Scenes, CopiesStayIndependent) {
  Scene a = gasket();
  const Scene b = a;
  a.primitives.clear();
  a.boundary_values.clear();
  const auto p = b.project_to_boundary(b.evaluation_point);
  EXPECT_GT(b.boundary_value(p.point), 0.0);
}

}  // namespace
}  // namespace arraywos
