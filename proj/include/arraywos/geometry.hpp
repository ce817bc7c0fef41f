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
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace arraywos {

// 2-D points carry z = 0.
using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

enum class PrimitiveKind { Circle, Arc, Segment, Polyline, Sphere };

std::string_view to_string(PrimitiveKind k);

struct BoundaryPrimitive {
  PrimitiveKind kind = PrimitiveKind::Circle;
  Vec3 center{};              // circle, arc, sphere
  double radius = 0.0;        // circle, arc, sphere
  double angle_start = 0.0;   // arc: counterclockwise from start to end
  double angle_end = 0.0;
  std::vector<Vec3> points;   // segment (2 points) or polyline vertices
  bool closed = false;        // polyline
  std::string label;

  static BoundaryPrimitive circle(Vec3 c, double r, std::string label);
  static BoundaryPrimitive arc(Vec3 c, double r, double a0, double a1, std::string label);
  static BoundaryPrimitive segment(Vec3 a, Vec3 b, std::string label);
  static BoundaryPrimitive polyline(std::vector<Vec3> pts, bool closed, std::string label);
  static BoundaryPrimitive sphere(Vec3 c, double r, std::string label);

  void validate() const;
  double distance(const Vec3& z) const;
  Vec3 project(const Vec3& z) const;
  // Point at parameter u in [0,1) along the primitive (tests and sampling).
  Vec3 sample(double u, double v = 0.0) const;
  // Crossings of the ray {z + t e_x, t > 0} with this primitive (2-D only).
  int ray_crossings(const Vec3& z) const;
  void extend_bounds(Vec3& lo, Vec3& hi) const;
};

using PointFunction = double (*)(const Vec3&);

// A boundary value or solution given either as a constant or as a named
// formula from the registry.
struct FieldSpec {
  std::variant<double, std::string> value;

  double evaluate(const Vec3& z) const;
  bool is_constant() const { return std::holds_alternative<double>(value); }
};

// Named closed-form functions usable from scene files.
PointFunction lookup_formula(std::string_view name);
std::vector<std::string> formula_names();

enum class SourceMode { None, General, ConstantShortcut };

struct SourceSpec {
  SourceMode mode = SourceMode::None;
  std::variant<double, std::string> value = 0.0;  // constant or formula name

  double evaluate(const Vec3& w) const;
  double constant() const;
};

struct Projection {
  Vec3 point{};
  double distance = 0.0;
  std::size_t primitive = 0;
};

class Scene {
 public:
  std::string name;
  int dimension = 2;
  Vec3 bbox_lo{};
  Vec3 bbox_hi{};
  std::vector<BoundaryPrimitive> primitives;
  std::vector<std::pair<std::string, FieldSpec>> boundary_values;
  SourceSpec source;
  std::optional<std::string> exact_solution_name;
  Vec3 evaluation_point{};
  double epsilon = 1e-4;

  // Checks primitives, labels, bounding box and evaluation point, and binds
  // label lookups. Call after editing any field.
  void finalize();

  double distance_to_boundary(const Vec3& z) const;
  Projection project_to_boundary(const Vec3& z) const;

  // b at a boundary point; the nearest primitive within 1e-9 supplies it.
  double boundary_value(const Vec3& zbar) const;
  double boundary_value_on(std::size_t primitive, const Vec3& zbar) const;

  bool has_source() const { return source.mode != SourceMode::None; }
  double source_value(const Vec3& w) const;

  Vec3 to_unit_cube(const Vec3& z) const;

  bool has_exact_solution() const { return exact_fn_ != nullptr; }
  double exact_solution(const Vec3& z) const;

  // Interior test: ray-crossing parity in 2-D, inside an odd number of
  // spheres in 3-D. Points on the boundary are outside.
  bool contains(const Vec3& z) const;

 private:
  std::vector<std::size_t> value_of_primitive_;  // index into boundary_values
  PointFunction exact_fn_ = nullptr;
};

// Built-in scenes.
Scene unit_disk();
Scene unit_ball();
Scene pacman();
Scene dumbbell(double L = 1.5, double R = 1.0, double w = 0.4);
Scene gasket();  // bundled scene file
Scene gasket_from_file(const std::filesystem::path& path);

std::vector<std::string> builtin_scene_names();
Scene builtin_scene(std::string_view name);

// Scene files (JSON).
Scene scene_from_json(std::string_view text);
Scene load_scene(const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);

// Resolves a built-in name or a path to a scene file.
Scene resolve_scene(std::string_view name_or_path);

}  // namespace arraywos
