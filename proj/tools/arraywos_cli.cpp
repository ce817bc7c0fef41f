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

// Command-line driver: run experiments, fit rates, KS and Sobol' studies,
// scene export.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arraywos/harness.hpp"
#include "arraywos/qmc_points.hpp"

namespace fs = std::filesystem;
using namespace arraywos;

namespace {

struct Flags {
  std::string config;
  std::string scene;
  std::vector<double> z0;
  std::string methods;
  std::string points;
  std::vector<std::size_t> ns;
  int reps = 0;
  double eps = -1.0;
  std::string variant;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool fixed_k = false;
  int k = 0;
  bool one_large_set = false;
  int threads = -1;
  bool no_timing = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void add_common(CLI::App* app, Flags& f, bool with_scene = true) {
  app->add_option("--config", f.config, "JSON config file; flags override its values");
  if (with_scene) app->add_option("--scene", f.scene, "built-in scene name or scene JSON file");
  app->add_option("--z0", f.z0, "start point override")->expected(2, 3)->delimiter(',');
  app->add_option("--method", f.methods, "comma list of mc, rqmc, array-rqmc, array-mc");
  app->add_option("--points", f.points, "comma list of sobol, lattice, fibonacci, stratified, hammersley");
  app->add_option("--n", f.ns, "sample sizes (powers of two)")->delimiter(',');
  app->add_option("--reps", f.reps, "replicates per (method, n)");
  app->add_option("--eps", f.eps, "stopping shell width (default: scene value)");
  app->add_option("--variant", f.variant,
                  "inactive handling: move-to-end, interleave, hammersley-onfly, fibonacci-onfly, stratified-onfly");
  app->add_option("--seed", f.seed, "master seed")->each([&f](const std::string&) { f.seed_set = true; });
  app->add_option("--out", f.out, "output directory");
  app->add_flag("--fixed-k", f.fixed_k, "stop every walk after exactly K steps");
  app->add_option("--k", f.k, "step budget K");
  app->add_flag("--one-large-set", f.one_large_set, "Array-RQMC: one (1+sK)-dimensional point set");
  app->add_option("--threads", f.threads, "replicate threads (default: all cores)");
  app->add_flag("--no-timing", f.no_timing, "leave the wall_ms column empty");
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) c.merge_json_file(f.config);
  if (!f.scene.empty()) c.scene = f.scene;
  if (!f.z0.empty()) c.z0 = Vec3{f.z0[0], f.z0[1], f.z0.size() > 2 ? f.z0[2] : 0.0};
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : split_list(f.methods)) c.methods.push_back(parse_method(m));
  }
  if (!f.points.empty()) {
    c.points.clear();
    for (const auto& p : split_list(f.points)) c.points.push_back(parse_construction(p));
  }
  if (!f.ns.empty()) c.ns = f.ns;
  if (f.reps > 0) c.reps = f.reps;
  if (f.eps >= 0.0) c.eps = f.eps;
  if (!f.variant.empty()) c.variant = parse_variant(f.variant);
  if (f.seed_set) c.seed = f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (f.fixed_k) c.fixed_k = true;
  if (f.k > 0) c.max_steps = f.k;
  if (f.one_large_set) c.one_large_set = true;
  if (f.threads >= 0) c.threads = f.threads;
  if (f.no_timing) c.timing = false;
  for (std::size_t n : c.ns)
    if (!is_power_of_two(n)) throw std::invalid_argument("n = " + std::to_string(n) + " is not a power of two");
  if (c.out.empty()) c.out = ".";
  return c;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

int cmd_run(const Flags& f) {
  const ExperimentConfig cfg = build_config(f);
  const Scene scene = resolve_scene(cfg.scene);
  const auto specs = expand_methods(cfg.methods, cfg.points, cfg.variant);
  const auto results = run_replicates(scene, cfg, specs);
  const fs::path path = fs::path(cfg.out) / "results.csv";
  auto out = open_out(path);
  write_results_csv(out, to_rows(scene.name, results, cfg.timing));
  std::cerr << "wrote " << results.size() << " rows to " << path.string() << "\n";
  return 0;
}

int cmd_rates(const std::string& in_path, const std::string& out_dir, std::optional<double> truth) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot read " + in_path);
  const auto rows = read_results_csv(in);
  const auto rates = rate_report(rows, truth);
  bool fitted = false;
  for (const auto& r : rates) fitted = fitted || r.slope.has_value();
  if (!fitted) throw std::invalid_argument("no series has two or more sample sizes n >= 128 to fit");
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  auto out = open_out(dir / "rates.csv");
  write_rates_csv(out, rates);
  write_rate_plots(dir / "plots", rows, rates);
  std::cerr << "wrote " << (dir / "rates.csv").string() << "\n";
  return 0;
}

int cmd_ks(const Flags& f, const std::vector<double>& ts) {
  ExperimentConfig cfg = build_config(f);
  if (cfg.scene != "unit_disk" && cfg.scene != "disk")
    throw std::invalid_argument("the KS study needs the unit_disk scene");
  const auto specs = expand_methods(cfg.methods, cfg.points, cfg.variant);
  const auto rows = ks_study(cfg, specs, ts);
  auto out = open_out(fs::path(cfg.out) / "ks.csv");
  write_ks_csv(out, rows);
  return 0;
}

int cmd_sobol(const Flags& f, int kprime) {
  const ExperimentConfig cfg = build_config(f);
  if (kprime < 1) throw std::invalid_argument("--kprime must be at least 1");
  const auto specs = expand_methods(cfg.methods, cfg.points, cfg.variant);
  const auto rows = sobol_study(cfg, specs, kprime);
  auto out = open_out(fs::path(cfg.out) / "sobol.csv");
  write_sobol_csv(out, rows);
  auto summary = open_out(fs::path(cfg.out) / "sobol_summary.txt");
  write_sobol_summary(summary, rows);
  return 0;
}

int cmd_export(const std::string& name, const std::string& out) {
  const Scene s = builtin_scene(name);
  const std::string text = scene_to_json(s);
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
  } else {
    auto f = open_out(out);
    f << text << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Walk-on-spheres solvers with MC, RQMC and Array-RQMC"};
  app.require_subcommand(1);

  Flags run_flags, ks_flags, sobol_flags;
  auto* run = app.add_subcommand("run", "run replicates and write results.csv");
  add_common(run, run_flags);

  std::string rates_in, rates_out;
  std::optional<double> truth;
  auto* rates = app.add_subcommand("rates", "fit rates and reduction factors from results.csv");
  rates->add_option("--in", rates_in, "results CSV")->required();
  rates->add_option("--out", rates_out, "output directory");
  rates->add_option("--truth", truth, "exact solution value; fits MSE instead of variance");

  std::vector<double> ts{1.0 / 3.0, 0.5, 0.75, 0.9};
  auto* ks = app.add_subcommand("ks", "exit-distribution KS study on the unit disk");
  add_common(ks, ks_flags);
  ks->add_option("--t", ts, "start points (t, 0)")->delimiter(',');

  int kprime = 20;
  auto* sobol = app.add_subcommand("sobol", "vector-wise Sobol' indices and mean dimension");
  add_common(sobol, sobol_flags);
  sobol->add_option("--kprime", kprime, "number of leading steps analysed");

  std::string export_name, export_out;
  auto* exp = app.add_subcommand("export-scene", "write a built-in scene as JSON");
  exp->add_option("name", export_name, "scene name")->required();
  exp->add_option("--out", export_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*rates) return cmd_rates(rates_in, rates_out, truth);
    if (*ks) {
      if (ks_flags.scene.empty()) ks_flags.scene = "unit_disk";
      return cmd_ks(ks_flags, ts);
    }
    if (*sobol) return cmd_sobol(sobol_flags, kprime);
    if (*exp) return cmd_export(export_name, export_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
