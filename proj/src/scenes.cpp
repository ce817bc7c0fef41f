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
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "arraywos/geometry.hpp"
#include "embedded_data.hpp"

namespace arraywos {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

double disk_solution(const Vec3& z) {
  const double dx = z[0] - 2.0;
  return 0.5 * std::log(dx * dx + z[1] * z[1]);
}

double ball_solution(const Vec3& z) {
  const double dx = z[0] - 2.0;
  return 1.0 / std::sqrt(dx * dx + z[1] * z[1] + z[2] * z[2]);
}

// Polar angle on the Pac-Man branch (-2pi, 0].
double pacman_theta(const Vec3& z) {
  double t = std::atan2(z[1], z[0]);
  if (t > 0) t -= 2.0 * kPi;
  return t;
}

double pacman_solution(const Vec3& z) {
  const double r2 = z[0] * z[0] + z[1] * z[1];
  return std::cbrt(std::sqrt(r2)) * std::sin(pacman_theta(z) / 3.0) + std::exp(-0.5 * r2);
}

double pacman_source(const Vec3& z) {
  const double r2 = z[0] * z[0] + z[1] * z[1];
  return -(2.0 - r2) * std::exp(-0.5 * r2);
}

struct Formula {
  const char* name;
  PointFunction fn;
};

constexpr Formula kFormulas[] = {
    {"unit_disk", disk_solution},
    {"unit_ball", ball_solution},
    {"pacman", pacman_solution},
    {"pacman_source", pacman_source},
};

Scene finalized(Scene s) {
  s.finalize();
  return s;
}

}  // namespace

PointFunction lookup_formula(std::string_view name) {
  for (const Formula& f : kFormulas)
    if (name == f.name) return f.fn;
  std::string known;
  for (const Formula& f : kFormulas) known += std::string(known.empty() ? "" : ", ") + f.name;
  fail("unknown formula '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<std::string> formula_names() {
  std::vector<std::string> out;
  for (const Formula& f : kFormulas) out.emplace_back(f.name);
  return out;
}

Scene unit_disk() {
  Scene s;
  s.name = "unit_disk";
  s.dimension = 2;
  s.bbox_lo = {-1, -1, 0};
  s.bbox_hi = {1, 1, 0};
  s.primitives.push_back(BoundaryPrimitive::circle({0, 0, 0}, 1.0, "circle"));
  s.boundary_values = {{"circle", FieldSpec{std::string("unit_disk")}}};
  s.exact_solution_name = "unit_disk";
  s.evaluation_point = {0.0, 0.5, 0.0};
  s.epsilon = 1e-4;
  return finalized(std::move(s));
}

Scene unit_ball() {
  Scene s;
  s.name = "unit_ball";
  s.dimension = 3;
  s.bbox_lo = {-1, -1, -1};
  s.bbox_hi = {1, 1, 1};
  s.primitives.push_back(BoundaryPrimitive::sphere({0, 0, 0}, 1.0, "sphere"));
  s.boundary_values = {{"sphere", FieldSpec{std::string("unit_ball")}}};
  s.exact_solution_name = "unit_ball";
  s.evaluation_point = {0.2, 0.3, -0.1};
  s.epsilon = 1e-4;
  return finalized(std::move(s));
}

Scene pacman() {
  Scene s;
  s.name = "pacman";
  s.dimension = 2;
  s.bbox_lo = {-1, -1, 0};
  s.bbox_hi = {1, 1, 0};
  s.primitives.push_back(BoundaryPrimitive::arc({0, 0, 0}, 1.0, kPi / 2, 2 * kPi, "arc"));
  s.primitives.push_back(BoundaryPrimitive::segment({0, 0, 0}, {1, 0, 0}, "edge_theta0"));
  s.primitives.push_back(BoundaryPrimitive::segment({0, 0, 0}, {0, 1, 0}, "edge_theta270"));
  // On each piece the closed-form solution reduces to that piece's boundary data.
  const FieldSpec b{std::string("pacman")};
  s.boundary_values = {{"arc", b}, {"edge_theta0", b}, {"edge_theta270", b}};
  s.source.mode = SourceMode::General;
  s.source.value = std::string("pacman_source");
  s.exact_solution_name = "pacman";
  const double r = 0.1244, theta = -0.7906;
  s.evaluation_point = {r * std::cos(theta), r * std::sin(theta), 0.0};
  s.epsilon = 1e-4;
  return finalized(std::move(s));
}

Scene dumbbell(double L, double R, double w) {
  if (!(w > 0 && w < R && R < L + std::sqrt(R * R - w * w)))
    fail("dumbbell parameters need 0 < w < R and a bridge of positive length");
  Scene s;
  s.name = "dumbbell";
  s.dimension = 2;
  s.bbox_lo = {-L - R, -R, 0};
  s.bbox_hi = {L + R, R, 0};
  const double a = std::asin(w / R);
  const double xj = L - std::sqrt(R * R - w * w);
  s.primitives.push_back(BoundaryPrimitive::arc({-L, 0, 0}, R, a, 2 * kPi - a, "wall"));
  s.primitives.push_back(BoundaryPrimitive::arc({L, 0, 0}, R, -kPi + a, kPi - a, "wall"));
  s.primitives.push_back(BoundaryPrimitive::segment({-xj, w, 0}, {xj, w, 0}, "wall"));
  s.primitives.push_back(BoundaryPrimitive::segment({-xj, -w, 0}, {xj, -w, 0}, "wall"));
  s.boundary_values = {{"wall", FieldSpec{0.0}}};
  s.source.mode = SourceMode::ConstantShortcut;
  s.source.value = -2.0;
  s.evaluation_point = {L - R, 0.0, 0.0};
  s.epsilon = 1e-4;
  return finalized(std::move(s));
}

Scene gasket() { return scene_from_json(embedded::gasket_scene()); }

Scene gasket_from_file(const std::filesystem::path& path) { return load_scene(path); }

std::vector<std::string> builtin_scene_names() {
  return {"unit_disk", "unit_ball", "pacman", "dumbbell", "gasket"};
}

Scene builtin_scene(std::string_view name) {
  if (name == "unit_disk" || name == "disk") return unit_disk();
  if (name == "unit_ball" || name == "ball") return unit_ball();
  if (name == "pacman") return pacman();
  if (name == "dumbbell") return dumbbell();
  if (name == "gasket") return gasket();
  std::string known;
  for (const auto& n : builtin_scene_names()) known += (known.empty() ? "" : ", ") + n;
  fail("unknown scene '" + std::string(name) + "' (known scenes: " + known + ")");
}

Scene resolve_scene(std::string_view name_or_path) {
  for (const auto& n : builtin_scene_names())
    if (name_or_path == n) return builtin_scene(n);
  if (name_or_path == "disk" || name_or_path == "ball") return builtin_scene(name_or_path);
  const std::filesystem::path p{std::string(name_or_path)};
  if (std::filesystem::exists(p)) return load_scene(p);
  return builtin_scene(name_or_path);  // throws with the list of known scenes
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec3 read_point(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail("expected a " + std::to_string(dim) + "-component point, got " + j.dump());
  Vec3 v{0, 0, 0};
  for (int i = 0; i < dim; ++i) v[i] = j.at(i).get<double>();
  return v;
}

json write_point(const Vec3& v, int dim) {
  json j = json::array();
  for (int i = 0; i < dim; ++i) j.push_back(v[i]);
  return j;
}

std::variant<double, std::string> read_field(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("formula")) return j.at("formula").get<std::string>();
  fail("boundary value must be a number or {\"formula\": name}, got " + j.dump());
}

json write_field(const std::variant<double, std::string>& v) {
  if (const double* c = std::get_if<double>(&v)) return *c;
  return json{{"formula", std::get<std::string>(v)}};
}

}  // namespace

Scene scene_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("scene file is not valid JSON: ") + e.what());
  }
  Scene s;
  try {
    s.name = j.value("name", std::string("custom"));
    s.dimension = j.at("dimension").get<int>();
    if (s.dimension != 2 && s.dimension != 3) fail("scene dimension must be 2 or 3");
    const int d = s.dimension;
    s.bbox_lo = read_point(j.at("bbox").at(0), d);
    s.bbox_hi = read_point(j.at("bbox").at(1), d);
    for (const json& p : j.at("primitives")) {
      const std::string kind = p.at("kind").get<std::string>();
      const json& q = p.at("params");
      const std::string label = p.at("label").get<std::string>();
      if (kind == "circle") {
        s.primitives.push_back(BoundaryPrimitive::circle(read_point(q.at("center"), 2), q.at("radius").get<double>(), label));
      } else if (kind == "arc") {
        s.primitives.push_back(BoundaryPrimitive::arc(read_point(q.at("center"), 2), q.at("radius").get<double>(),
                                                      q.at("angle_start").get<double>(),
                                                      q.at("angle_end").get<double>(), label));
      } else if (kind == "segment") {
        s.primitives.push_back(BoundaryPrimitive::segment(read_point(q.at("a"), 2), read_point(q.at("b"), 2), label));
      } else if (kind == "polyline") {
        std::vector<Vec3> pts;
        for (const json& v : q.at("points")) pts.push_back(read_point(v, 2));
        s.primitives.push_back(BoundaryPrimitive::polyline(std::move(pts), q.value("closed", false), label));
      } else if (kind == "sphere") {
        s.primitives.push_back(BoundaryPrimitive::sphere(read_point(q.at("center"), 3), q.at("radius").get<double>(), label));
      } else {
        fail("unknown primitive kind '" + kind + "'");
      }
    }
    for (const auto& [label, v] : j.at("boundary_values").items())
      s.boundary_values.emplace_back(label, FieldSpec{read_field(v)});
    const json src = j.value("source", json("none"));
    if (src.is_string()) {
      if (src.get<std::string>() != "none") {
        s.source.mode = SourceMode::General;
        s.source.value = src.get<std::string>();
      }
    } else if (src.is_object()) {
      const std::string mode = src.value("mode", std::string("general"));
      if (mode == "constant_shortcut") s.source.mode = SourceMode::ConstantShortcut;
      else if (mode == "general") s.source.mode = SourceMode::General;
      else fail("unknown source mode '" + mode + "'");
      if (src.contains("constant")) s.source.value = src.at("constant").get<double>();
      else if (src.contains("formula")) s.source.value = src.at("formula").get<std::string>();
      else fail("source needs a constant or a formula");
    } else {
      fail("malformed source entry");
    }
    if (j.contains("exact_solution") && !j.at("exact_solution").is_null())
      s.exact_solution_name = j.at("exact_solution").get<std::string>();
    s.evaluation_point = read_point(j.at("evaluation_point"), d);
    s.epsilon = j.value("epsilon", 1e-4);
  } catch (const json::exception& e) {
    fail(std::string("malformed scene file: ") + e.what());
  }
  s.finalize();
  return s;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scene file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return scene_from_json(buf.str());
}

std::string scene_to_json(const Scene& s) {
  const int d = s.dimension;
  json j;
  j["name"] = s.name;
  j["dimension"] = d;
  j["bbox"] = json::array({write_point(s.bbox_lo, d), write_point(s.bbox_hi, d)});
  json prims = json::array();
  for (const BoundaryPrimitive& p : s.primitives) {
    json q;
    switch (p.kind) {
      case PrimitiveKind::Circle:
      case PrimitiveKind::Sphere:
        q = {{"center", write_point(p.center, d)}, {"radius", p.radius}};
        break;
      case PrimitiveKind::Arc:
        q = {{"center", write_point(p.center, 2)}, {"radius", p.radius},
             {"angle_start", p.angle_start}, {"angle_end", p.angle_end}};
        break;
      case PrimitiveKind::Segment:
        q = {{"a", write_point(p.points[0], 2)}, {"b", write_point(p.points[1], 2)}};
        break;
      case PrimitiveKind::Polyline: {
        json pts = json::array();
        for (const Vec3& v : p.points) pts.push_back(write_point(v, 2));
        q = {{"points", pts}, {"closed", p.closed}};
        break;
      }
    }
    prims.push_back({{"kind", std::string(to_string(p.kind))}, {"params", q}, {"label", p.label}});
  }
  j["primitives"] = prims;
  json bv = json::object();
  for (const auto& [label, f] : s.boundary_values) bv[label] = write_field(f.value);
  j["boundary_values"] = bv;
  switch (s.source.mode) {
    case SourceMode::None: j["source"] = "none"; break;
    case SourceMode::General: {
      json src = {{"mode", "general"}};
      if (const double* c = std::get_if<double>(&s.source.value)) src["constant"] = *c;
      else src["formula"] = std::get<std::string>(s.source.value);
      j["source"] = src;
      break;
    }
    case SourceMode::ConstantShortcut:
      j["source"] = {{"mode", "constant_shortcut"}, {"constant", s.source.constant()}};
      break;
  }
  if (s.exact_solution_name) j["exact_solution"] = *s.exact_solution_name;
  j["evaluation_point"] = write_point(s.evaluation_point, d);
  j["epsilon"] = s.epsilon;
  return j.dump(1) + "\n";
}

}  // namespace arraywos
