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
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "arraywos/geometry.hpp"

namespace arraywos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAttributionTol = 1e-9;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

Vec3 closest_on_segment(const Vec3& z, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  double t = dot(z - a, ab) / dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  return a + t * ab;
}

// Offset of angle phi past `start`, in [0, 2pi).
double angle_offset(double phi, double start) {
  double t = std::fmod(phi - start, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

Vec3 on_circle(const Vec3& c, double r, double phi) {
  return {c[0] + r * std::cos(phi), c[1] + r * std::sin(phi), 0.0};
}

Vec3 radial_projection(const Vec3& z, const Vec3& c, double r) {
  const Vec3 d = z - c;
  const double len = norm(d);
  if (len == 0.0) return c + Vec3{r, 0.0, 0.0};
  return c + (r / len) * d;
}

int segment_crossings(const Vec3& z, const Vec3& a, const Vec3& b) {
  if ((a[1] > z[1]) == (b[1] > z[1])) return 0;
  const double x = a[0] + (z[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
  return x > z[0] ? 1 : 0;
}

}  // namespace

std::string_view to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Circle: return "circle";
    case PrimitiveKind::Arc: return "arc";
    case PrimitiveKind::Segment: return "segment";
    case PrimitiveKind::Polyline: return "polyline";
    case PrimitiveKind::Sphere: return "sphere";
  }
  return "?";
}

BoundaryPrimitive BoundaryPrimitive::circle(Vec3 c, double r, std::string label) {
  BoundaryPrimitive p;
  p.kind = PrimitiveKind::Circle;
  p.center = c;
  p.radius = r;
  p.label = std::move(label);
  return p;
}

BoundaryPrimitive BoundaryPrimitive::arc(Vec3 c, double r, double a0, double a1, std::string label) {
  BoundaryPrimitive p = circle(c, r, std::move(label));
  p.kind = PrimitiveKind::Arc;
  p.angle_start = a0;
  p.angle_end = a1;
  return p;
}

BoundaryPrimitive BoundaryPrimitive::segment(Vec3 a, Vec3 b, std::string label) {
  BoundaryPrimitive p;
  p.kind = PrimitiveKind::Segment;
  p.points = {a, b};
  p.label = std::move(label);
  return p;
}

BoundaryPrimitive BoundaryPrimitive::polyline(std::vector<Vec3> pts, bool closed, std::string label) {
  BoundaryPrimitive p;
  p.kind = PrimitiveKind::Polyline;
  p.points = std::move(pts);
  p.closed = closed;
  p.label = std::move(label);
  return p;
}

BoundaryPrimitive BoundaryPrimitive::sphere(Vec3 c, double r, std::string label) {
  BoundaryPrimitive p = circle(c, r, std::move(label));
  p.kind = PrimitiveKind::Sphere;
  return p;
}

void BoundaryPrimitive::validate() const {
  switch (kind) {
    case PrimitiveKind::Circle:
    case PrimitiveKind::Sphere:
      if (!(radius > 0)) fail("primitive '" + label + "' needs a positive radius");
      break;
    case PrimitiveKind::Arc: {
      if (!(radius > 0)) fail("arc '" + label + "' needs a positive radius");
      const double span = angle_end - angle_start;
      if (!(span > 0 && span <= kTwoPi + 1e-12)) fail("arc '" + label + "' has an empty or overlapping angle range");
      break;
    }
    case PrimitiveKind::Segment:
      if (points.size() != 2 || points[0] == points[1])
        fail("segment '" + label + "' needs two distinct endpoints");
      break;
    case PrimitiveKind::Polyline:
      if (points.size() < 2) fail("polyline '" + label + "' needs at least two points");
      for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i] == points[i + 1]) fail("polyline '" + label + "' repeats a vertex");
      break;
  }
}

double BoundaryPrimitive::distance(const Vec3& z) const {
  switch (kind) {
    case PrimitiveKind::Circle:
    case PrimitiveKind::Sphere:
      return std::abs(norm(z - center) - radius);
    case PrimitiveKind::Arc: {
      const double phi = std::atan2(z[1] - center[1], z[0] - center[0]);
      if (angle_offset(phi, angle_start) <= angle_end - angle_start)
        return std::abs(norm(z - center) - radius);
      return std::min(norm(z - on_circle(center, radius, angle_start)),
                      norm(z - on_circle(center, radius, angle_end)));
    }
    case PrimitiveKind::Segment:
      return norm(z - closest_on_segment(z, points[0], points[1]));
    case PrimitiveKind::Polyline: {
      double best = std::numeric_limits<double>::infinity();
      const std::size_t m = points.size();
      const std::size_t edges = closed ? m : m - 1;
      for (std::size_t i = 0; i < edges; ++i)
        best = std::min(best, norm(z - closest_on_segment(z, points[i], points[(i + 1) % m])));
      return best;
    }
  }
  return std::numeric_limits<double>::infinity();
}

Vec3 BoundaryPrimitive::project(const Vec3& z) const {
  switch (kind) {
    case PrimitiveKind::Circle:
    case PrimitiveKind::Sphere:
      return radial_projection(z, center, radius);
    case PrimitiveKind::Arc: {
      const double phi = std::atan2(z[1] - center[1], z[0] - center[0]);
      if (angle_offset(phi, angle_start) <= angle_end - angle_start && z != center)
        return radial_projection(z, center, radius);
      const Vec3 a = on_circle(center, radius, angle_start);
      const Vec3 b = on_circle(center, radius, angle_end);
      return norm(z - a) <= norm(z - b) ? a : b;
    }
    case PrimitiveKind::Segment:
      return closest_on_segment(z, points[0], points[1]);
    case PrimitiveKind::Polyline: {
      double best = std::numeric_limits<double>::infinity();
      Vec3 out = points[0];
      const std::size_t m = points.size();
      const std::size_t edges = closed ? m : m - 1;
      for (std::size_t i = 0; i < edges; ++i) {
        const Vec3 q = closest_on_segment(z, points[i], points[(i + 1) % m]);
        const double d = norm(z - q);
        if (d < best) {
          best = d;
          out = q;
        }
      }
      return out;
    }
  }
  return z;
}

Vec3 BoundaryPrimitive::sample(double u, double v) const {
  switch (kind) {
    case PrimitiveKind::Circle:
      return on_circle(center, radius, kTwoPi * u);
    case PrimitiveKind::Arc:
      return on_circle(center, radius, angle_start + u * (angle_end - angle_start));
    case PrimitiveKind::Segment:
      return points[0] + u * (points[1] - points[0]);
    case PrimitiveKind::Polyline: {
      const std::size_t m = points.size();
      const std::size_t edges = closed ? m : m - 1;
      std::vector<double> len(edges);
      double total = 0;
      for (std::size_t i = 0; i < edges; ++i) total += len[i] = norm(points[(i + 1) % m] - points[i]);
      double t = u * total;
      for (std::size_t i = 0; i < edges; ++i) {
        if (t <= len[i] || i + 1 == edges)
          return points[i] + std::min(t / len[i], 1.0) * (points[(i + 1) % m] - points[i]);
        t -= len[i];
      }
      return points[0];
    }
    case PrimitiveKind::Sphere: {
      const double zc = 1.0 - 2.0 * u;
      const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      const Vec3 dir{rho * std::cos(kTwoPi * v), rho * std::sin(kTwoPi * v), zc};
      return center + radius * dir;
    }
  }
  return center;
}

int BoundaryPrimitive::ray_crossings(const Vec3& z) const {
  switch (kind) {
    case PrimitiveKind::Circle:
    case PrimitiveKind::Arc: {
      const double dy = z[1] - center[1];
      if (std::abs(dy) >= radius) return 0;
      const double h = std::sqrt(radius * radius - dy * dy);
      int count = 0;
      for (double x : {center[0] - h, center[0] + h}) {
        if (x <= z[0]) continue;
        if (kind == PrimitiveKind::Arc) {
          const double phi = std::atan2(dy, x - center[0]);
          if (angle_offset(phi, angle_start) > angle_end - angle_start) continue;
        }
        ++count;
      }
      return count;
    }
    case PrimitiveKind::Segment:
      return segment_crossings(z, points[0], points[1]);
    case PrimitiveKind::Polyline: {
      int count = 0;
      const std::size_t m = points.size();
      const std::size_t edges = closed ? m : m - 1;
      for (std::size_t i = 0; i < edges; ++i) count += segment_crossings(z, points[i], points[(i + 1) % m]);
      return count;
    }
    case PrimitiveKind::Sphere:
      return norm(z - center) < radius ? 1 : 0;
  }
  return 0;
}

void BoundaryPrimitive::extend_bounds(Vec3& lo, Vec3& hi) const {
  auto add = [&](const Vec3& p) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  };
  switch (kind) {
    case PrimitiveKind::Circle:
    case PrimitiveKind::Arc:
      add(center + Vec3{radius, radius, 0});
      add(center - Vec3{radius, radius, 0});
      break;
    case PrimitiveKind::Sphere:
      add(center + Vec3{radius, radius, radius});
      add(center - Vec3{radius, radius, radius});
      break;
    case PrimitiveKind::Segment:
    case PrimitiveKind::Polyline:
      for (const Vec3& p : points) add(p);
      break;
  }
}

// ---------------------------------------------------------------------------

double FieldSpec::evaluate(const Vec3& z) const {
  if (const double* c = std::get_if<double>(&value)) return *c;
  return lookup_formula(std::get<std::string>(value))(z);
}

double SourceSpec::evaluate(const Vec3& w) const {
  if (mode == SourceMode::None) throw std::logic_error("scene has no source term");
  if (const double* c = std::get_if<double>(&value)) return *c;
  return lookup_formula(std::get<std::string>(value))(w);
}

double SourceSpec::constant() const {
  if (const double* c = std::get_if<double>(&value)) return *c;
  throw std::logic_error("source is not a constant");
}

void Scene::finalize() {
  if (dimension != 2 && dimension != 3) fail("scene dimension must be 2 or 3");
  if (primitives.empty()) fail("scene '" + name + "' has no boundary primitives");
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  value_of_primitive_.clear();
  for (const BoundaryPrimitive& p : primitives) {
    p.validate();
    if ((dimension == 3) != (p.kind == PrimitiveKind::Sphere))
      fail("primitive kind '" + std::string(to_string(p.kind)) + "' does not fit a " +
           std::to_string(dimension) + "-D scene");
    p.extend_bounds(lo, hi);
    std::size_t idx = boundary_values.size();
    for (std::size_t k = 0; k < boundary_values.size(); ++k)
      if (boundary_values[k].first == p.label) idx = k;
    if (idx == boundary_values.size()) fail("no boundary value for label '" + p.label + "'");
    const FieldSpec& spec = boundary_values[idx].second;
    if (!spec.is_constant()) lookup_formula(std::get<std::string>(spec.value));
    value_of_primitive_.push_back(idx);
  }
  for (int i = 0; i < dimension; ++i) {
    if (!(bbox_lo[i] < bbox_hi[i])) fail("scene bounding box is empty");
    if (lo[i] < bbox_lo[i] - 1e-12 || hi[i] > bbox_hi[i] + 1e-12)
      fail("scene bounding box does not contain every primitive");
  }
  if (source.mode != SourceMode::None && !std::holds_alternative<double>(source.value))
    lookup_formula(std::get<std::string>(source.value));
  if (source.mode == SourceMode::ConstantShortcut && !std::holds_alternative<double>(source.value))
    fail("constant-shortcut source needs a constant");
  if (source.mode == SourceMode::General && dimension == 3)
    fail("general source terms are only supported in 2-D");
  exact_fn_ = exact_solution_name ? lookup_formula(*exact_solution_name) : nullptr;
  if (!(epsilon > 0)) fail("scene epsilon must be positive");
  if (!contains(evaluation_point)) fail("evaluation point of scene '" + name + "' is not interior");
}

double Scene::distance_to_boundary(const Vec3& z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const BoundaryPrimitive& p : primitives) best = std::min(best, p.distance(z));
  return best;
}

Projection Scene::project_to_boundary(const Vec3& z) const {
  Projection out;
  out.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const double d = primitives[i].distance(z);
    if (d < out.distance) {
      out.distance = d;
      out.primitive = i;
    }
  }
  out.point = primitives[out.primitive].project(z);
  return out;
}

double Scene::boundary_value_on(std::size_t primitive, const Vec3& zbar) const {
  return boundary_values[value_of_primitive_.at(primitive)].second.evaluate(zbar);
}

double Scene::boundary_value(const Vec3& zbar) const {
  const Projection p = project_to_boundary(zbar);
  if (p.distance > kAttributionTol)
    throw std::invalid_argument("point is not on the boundary (distance " + std::to_string(p.distance) + ")");
  return boundary_value_on(p.primitive, zbar);
}

double Scene::source_value(const Vec3& w) const { return source.evaluate(w); }

Vec3 Scene::to_unit_cube(const Vec3& z) const {
  Vec3 u{0, 0, 0};
  for (int i = 0; i < dimension; ++i) u[i] = (z[i] - bbox_lo[i]) / (bbox_hi[i] - bbox_lo[i]);
  return u;
}

double Scene::exact_solution(const Vec3& z) const {
  if (!exact_fn_) throw std::logic_error("scene '" + name + "' has no closed-form solution");
  return exact_fn_(z);
}

bool Scene::contains(const Vec3& z) const {
  if (distance_to_boundary(z) <= 0.0) return false;
  int crossings = 0;
  for (const BoundaryPrimitive& p : primitives) crossings += p.ray_crossings(z);
  return crossings % 2 == 1;
}

}  // namespace arraywos
