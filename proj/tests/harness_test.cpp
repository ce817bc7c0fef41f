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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "arraywos/harness.hpp"

namespace arraywos {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arraywos_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ARRAYWOS_CLI) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

ExperimentConfig disk_config() {
  ExperimentConfig c;
  c.scene = "unit_disk";
  c.methods = {Method::MC, Method::RQMC, Method::ArrayRQMC};
  c.points = {Construction::Sobol, Construction::KuoLattice};
  c.ns = {128, 256};
  c.reps = 4;
  c.seed = 5;
  return c;
}

TEST(Harness, ExpandMethods) {
  const auto specs = expand_methods({Method::MC, Method::ArrayRQMC, Method::ArrayMC},
                                    {Construction::Sobol, Construction::KuoLattice}, InactiveVariant::Interleave);
  ASSERT_EQ(specs.size(), 4u);
  EXPECT_EQ(specs[0].label(), "mc/mc/move-to-end");
  EXPECT_EQ(specs[1].label(), "array-rqmc/sobol/interleave");
  EXPECT_EQ(specs[2].label(), "array-rqmc/lattice/interleave");
  EXPECT_EQ(specs[3].label(), "array-mc/mc/interleave");
  MethodSpec onfly{Method::ArrayRQMC, Construction::Sobol, InactiveVariant::FibonacciOnFly};
  EXPECT_EQ(onfly.points_label(), "fibonacci");
}

TEST(Harness, TwoReplicatesGiveTwoRowsPerMethod) {
  ExperimentConfig c = disk_config();
  c.ns = {4};
  c.reps = 2;
  const Scene s = unit_disk();
  const auto specs = expand_methods(c.methods, c.points, c.variant);
  const auto rows = to_rows(s.name, run_replicates(s, c, specs), false);
  EXPECT_EQ(rows.size(), 2 * specs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].replicate, static_cast<int>(i % 2));
}

TEST(Harness, ResultsAreThreadIndependent) {
  ExperimentConfig c = disk_config();
  const Scene s = unit_disk();
  const auto specs = expand_methods(c.methods, c.points, c.variant);
  c.threads = 1;
  std::ostringstream a, b;
  write_results_csv(a, to_rows(s.name, run_replicates(s, c, specs), false));
  c.threads = 4;
  write_results_csv(b, to_rows(s.name, run_replicates(s, c, specs), false));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Harness, ResultsCsvRoundTrip) {
  ResultRow r{"my,scene \"x\"", "mc", "mc", "move-to-end", 128, 3, 18446744073709551615ULL, 0.1 + 0.2,
              12.5, 40, 1.25};
  ResultRow q = r;
  q.wall_ms.reset();
  std::stringstream ss;
  write_results_csv(ss, {r, q});
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
  EXPECT_NE(text.find("\"my,scene \"\"x\"\"\""), std::string::npos);
  const auto back = read_results_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].scene, r.scene);
  EXPECT_EQ(back[0].seed, r.seed);
  EXPECT_EQ(back[0].estimate, r.estimate);
  EXPECT_EQ(back[0].wall_ms, r.wall_ms);
  EXPECT_FALSE(back[1].wall_ms.has_value());
  std::istringstream bad("scene,method\n");
  EXPECT_THROW(read_results_csv(bad), std::invalid_argument);
}

TEST(Harness, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -0.0})
    EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Harness, RateReportMatchesAnalysis) {
  ExperimentConfig c = disk_config();
  c.reps = 6;
  const Scene s = unit_disk();
  const auto specs = expand_methods(c.methods, c.points, c.variant);
  const auto rows = to_rows(s.name, run_replicates(s, c, specs), false);
  const double truth = s.exact_solution(s.evaluation_point);
  const auto rates = rate_report(rows, truth);

  auto estimates = [&](const std::string& method, const std::string& points, std::size_t n) {
    std::vector<double> out;
    for (const auto& r : rows)
      if (r.method == method && r.points == points && r.n == n) out.push_back(r.estimate);
    return out;
  };
  int pooled = 0;
  for (const RateRow& r : rates) {
    if (!r.n) {
      EXPECT_EQ(r.points, "sobol+lattice");
      ++pooled;
      continue;
    }
    const auto est = estimates(r.method, r.points, *r.n);
    EXPECT_EQ(*r.vrf_vs_mc, reduction_factor(est, estimates("mc", "mc", *r.n), truth).value);
    EXPECT_EQ(*r.mse, mean_squared_error(est, truth));
    EXPECT_TRUE(r.slope.has_value());
  }
  EXPECT_EQ(pooled, 2);  // rqmc and array-rqmc

  std::ostringstream out;
  write_rates_csv(out, rates);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kRatesHeader);
}

TEST(Harness, RateFitOfSyntheticData) {
  std::vector<ResultRow> rows;
  for (std::size_t n : {128u, 256u, 512u, 1024u}) {
    // Two replicates at +-sqrt(c/n): unbiased variance 2c/n.
    for (int r = 0; r < 2; ++r) {
      ResultRow row{"s", "mc", "mc", "move-to-end", n, r, 0, (r ? 1.0 : -1.0) * std::sqrt(1.0 / n), 0, 0, {}};
      rows.push_back(row);
    }
  }
  const auto rates = rate_report(rows, std::nullopt);
  ASSERT_EQ(rates.size(), 4u);
  EXPECT_NEAR(*rates[0].slope, -1.0, 1e-12);
  EXPECT_FALSE(rates[0].mse.has_value());
}

TEST(Harness, KsStudyRows) {
  ExperimentConfig c;
  c.methods = {Method::MC, Method::ArrayRQMC};
  c.points = {Construction::Sobol};
  c.ns = {64};
  c.reps = 3;
  const auto rows = ks_study(c, expand_methods(c.methods, c.points, c.variant), {0.0, 0.5});
  ASSERT_EQ(rows.size(), 4u);
  for (const KsRow& r : rows) {
    EXPECT_EQ(r.ref_opt, 1.0 / 128);
    EXPECT_EQ(r.ref_mc, ks_reference_mc(64));
    EXPECT_GE(r.mean_ks, r.ref_opt);
    EXPECT_LE(r.mean_ks, 1.0);
  }
  EXPECT_THROW(ks_study(c, expand_methods(c.methods, c.points, c.variant), {1.0}), std::invalid_argument);
}

TEST(Harness, SobolSummaryLayout) {
  ExperimentConfig c;
  c.scene = "unit_disk";
  c.methods = {Method::MC, Method::RQMC, Method::ArrayRQMC, Method::ArrayMC};
  c.points = {Construction::Sobol, Construction::KuoLattice};
  c.ns = {64};
  c.reps = 8;
  const auto rows = sobol_study(c, expand_methods(c.methods, c.points, c.variant), 4);
  EXPECT_EQ(rows.size(), 6u);
  std::ostringstream csv, summary;
  write_sobol_csv(csv, rows);
  write_sobol_summary(summary, rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), kSobolHeader);
  const std::string text = summary.str();
  for (const char* label : {"MC\t", "Sobol\t", "Lattice\t"}) EXPECT_NE(text.find(label), std::string::npos);
  EXPECT_EQ(text.find("-"), std::string::npos);

  c.scene = "synthetic-additive";
  c.reps = 400;
  const auto syn = sobol_study(c, {}, 3);
  ASSERT_EQ(syn.size(), 1u);
  EXPECT_NEAR(syn[0].report.nu, 1.0, 3 * syn[0].report.nu_se);
}

TEST(Harness, ConfigFileMerge) {
  const fs::path dir = scratch("config");
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"scene": "gasket", "method": ["mc", "array-rqmc"], "points": "lattice", "n": [128, 256],
             "reps": 7, "eps": 0.01, "variant": "interleave", "seed": 99, "fixed_k": true, "z0": [0.1, 0.2]})";
  }
  ExperimentConfig c;
  c.merge_json_file(dir / "cfg.json");
  EXPECT_EQ(c.scene, "gasket");
  EXPECT_EQ(c.methods.size(), 2u);
  EXPECT_EQ(c.points, std::vector<Construction>{Construction::KuoLattice});
  EXPECT_EQ(c.ns, (std::vector<std::size_t>{128, 256}));
  EXPECT_EQ(c.reps, 7);
  EXPECT_EQ(c.eps, 0.01);
  EXPECT_EQ(c.variant, InactiveVariant::Interleave);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_TRUE(c.fixed_k);
  EXPECT_EQ(*c.z0, (Vec3{0.1, 0.2, 0}));
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"reps": "many"})";
  }
  EXPECT_THROW(c.merge_json_file(dir / "bad.json"), std::invalid_argument);
  EXPECT_THROW(c.merge_json_file(dir / "missing.json"), std::invalid_argument);
}

TEST(Cli, RunIsDeterministicAcrossThreadCounts) {
  const fs::path dir = scratch("cli_run");
  const std::string common =
      "run --scene gasket --method mc,rqmc,array-rqmc --points sobol,lattice --n 128,256 --reps 3 --seed 4 "
      "--no-timing";
  ASSERT_EQ(cli(common + " --threads 1 --out " + (dir / "a").string()), 0);
  ASSERT_EQ(cli(common + " --threads 3 --out " + (dir / "b").string()), 0);
  const std::string a = slurp(dir / "a" / "results.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "results.csv"));
  ASSERT_EQ(cli("rates --in " + (dir / "a" / "results.csv").string() + " --out " + (dir / "a").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "rates.csv"));
  EXPECT_TRUE(fs::exists(dir / "a" / "plots"));
}

TEST(Cli, Errors) {
  const fs::path dir = scratch("cli_err");
  EXPECT_NE(cli("run --scene teapot --out " + dir.string()), 0);
  EXPECT_NE(cli("run --n 100 --out " + dir.string()), 0);
  EXPECT_NE(cli("ks --scene gasket --out " + dir.string()), 0);
  EXPECT_NE(cli("export-scene teapot"), 0);
  EXPECT_NE(cli("frobnicate"), 0);
}

TEST(Cli, ExportedScenesLoad) {
  const fs::path dir = scratch("cli_export");
  for (const auto& name : builtin_scene_names()) {
    const fs::path p = dir / (name + ".json");
    ASSERT_EQ(cli("export-scene " + name + " --out " + p.string()), 0) << name;
    const Scene s = load_scene(p);
    EXPECT_EQ(s.primitives.size(), builtin_scene(name).primitives.size());
  }
  EXPECT_EQ(load_scene(dir / "dumbbell.json").primitives.size(), 4u);
}

}  // namespace
}  // namespace arraywos
