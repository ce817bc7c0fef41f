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

#include "arraywos/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>
#include <omp.h>

#include "arraywos/rng.hpp"

namespace arraywos {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

bool is_mc_type(Method m) { return m == Method::MC || m == Method::ArrayMC; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string MethodSpec::points_label() const {
  if (is_mc_type(method)) return "mc";
  switch (variant) {
    case InactiveVariant::HammersleyOnFly: return "hammersley";
    case InactiveVariant::FibonacciOnFly: return "fibonacci";
    case InactiveVariant::StratifiedOnFly: return "stratified";
    default: return std::string(to_string(points));
  }
}

std::string MethodSpec::label() const {
  return std::string(to_string(method)) + "/" + points_label() + "/" + std::string(to_string(variant));
}

std::vector<MethodSpec> expand_methods(const std::vector<Method>& methods,
                                       const std::vector<Construction>& points,
                                       InactiveVariant variant) {
  std::vector<MethodSpec> out;
  for (Method m : methods) {
    const InactiveVariant v =
        (m == Method::ArrayRQMC || m == Method::ArrayMC) ? variant : InactiveVariant::MoveToEnd;
    if (is_mc_type(m)) {
      out.push_back({m, Construction::MC, v});
      continue;
    }
    for (Construction c : points) {
      if (c == Construction::MC) continue;
      out.push_back({m, c, v});
    }
  }
  return out;
}

void ExperimentConfig::merge_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.contains("scene")) scene = j.at("scene").get<std::string>();
    if (j.contains("z0")) {
      const auto v = j.at("z0").get<std::vector<double>>();
      if (v.size() < 2 || v.size() > 3) fail("z0 needs 2 or 3 coordinates");
      z0 = Vec3{v[0], v[1], v.size() == 3 ? v[2] : 0.0};
    }
    auto names = [&](const char* key) {
      std::vector<std::string> out;
      const auto& v = j.at(key);
      if (v.is_string()) out.push_back(v.get<std::string>());
      else out = v.get<std::vector<std::string>>();
      return out;
    };
    if (j.contains("method")) {
      methods.clear();
      for (const auto& s : names("method")) methods.push_back(parse_method(s));
    }
    if (j.contains("points")) {
      points.clear();
      for (const auto& s : names("points")) points.push_back(parse_construction(s));
    }
    if (j.contains("n")) {
      ns = j.at("n").is_array() ? j.at("n").get<std::vector<std::size_t>>()
                                : std::vector<std::size_t>{j.at("n").get<std::size_t>()};
    }
    if (j.contains("reps")) reps = j.at("reps").get<int>();
    if (j.contains("eps")) eps = j.at("eps").get<double>();
    if (j.contains("variant")) variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("fixed_k")) fixed_k = j.at("fixed_k").get<bool>();
    if (j.contains("k")) max_steps = j.at("k").get<int>();
    if (j.contains("one_large_set")) one_large_set = j.at("one_large_set").get<bool>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) out = j.at("out").get<std::string>();
    if (j.contains("threads")) threads = j.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed config file: ") + e.what());
  }
}

std::uint64_t replicate_seed(std::uint64_t master, const MethodSpec& spec, std::size_t n, int replicate) {
  return derive_seed(master, {hash_label(spec.label()), static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(replicate)});
}

RunConfig make_run_config(const ExperimentConfig& cfg, const MethodSpec& spec, std::size_t n,
                          std::uint64_t seed) {
  RunConfig rc;
  rc.method = spec.method;
  rc.points = spec.points;
  rc.variant = spec.variant;
  rc.z0 = cfg.z0;
  rc.epsilon = cfg.eps;
  rc.max_steps = cfg.max_steps;
  rc.n = n;
  rc.stopping = cfg.fixed_k ? StoppingMode::FixedK : StoppingMode::Epsilon;
  rc.one_large_set = cfg.one_large_set && spec.method == Method::ArrayRQMC;
  rc.seed = seed;
  rc.execution = Execution::Serial;
  return rc;
}

int resolve_threads(int requested) { return requested > 0 ? requested : std::max(1, omp_get_num_procs()); }

std::vector<ReplicateResult> run_replicates(const Scene& scene, const ExperimentConfig& cfg,
                                            const std::vector<MethodSpec>& specs, bool keep_walkers) {
  if (cfg.reps < 1) fail("replicate count must be at least 1");
  std::vector<ReplicateResult> tasks;
  std::vector<WalkEngine> engines;
  std::vector<std::size_t> engine_of;
  for (const MethodSpec& spec : specs) {
    for (std::size_t n : cfg.ns) {
      // Validates the combination once, before any work starts.
      engines.emplace_back(scene, make_run_config(cfg, spec, n, 0));
      for (int r = 0; r < cfg.reps; ++r) {
        ReplicateResult t;
        t.spec = spec;
        t.n = n;
        t.replicate = r;
        t.seed = replicate_seed(cfg.seed, spec, n, r);
        tasks.push_back(std::move(t));
        engine_of.push_back(engines.size() - 1);
      }
    }
  }
  std::string error;
  const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(cfg.threads))
  for (std::int64_t i = 0; i < count; ++i) {
    ReplicateResult& t = tasks[i];
    try {
      const WalkEngine& engine = engines[engine_of[i]];
      const auto start = std::chrono::steady_clock::now();
      t.record = engine.run(make_schedule(t.seed, engine.max_steps()));
      t.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      if (!keep_walkers) {
        t.record.payoffs = {};
        t.record.terminal_points = {};
        t.record.steps = {};
      }
    } catch (const std::exception& e) {
#pragma omp critical
      error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  return tasks;
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << "\n";
  for (const ResultRow& r : rows) {
    out << csv_field(r.scene) << ',' << r.method << ',' << r.points << ',' << r.variant << ','
        << r.n << ',' << r.replicate << ',' << r.seed << ',' << format_double(r.estimate) << ','
        << format_double(r.mean_steps) << ',' << r.max_steps << ',' << opt(r.wall_ms) << "\n";
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail("results file is empty");
  const auto header = split_csv_line(line);
  const auto expected = split_csv_line(kResultsHeader);
  if (header != expected) fail("results file header does not match: " + line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != expected.size()) fail("malformed results line: " + line);
    ResultRow r;
    try {
      r.scene = f[0];
      r.method = f[1];
      r.points = f[2];
      r.variant = f[3];
      r.n = std::stoull(f[4]);
      r.replicate = std::stoi(f[5]);
      r.seed = std::stoull(f[6]);
      r.estimate = std::stod(f[7]);
      r.mean_steps = std::stod(f[8]);
      r.max_steps = static_cast<std::uint32_t>(std::stoul(f[9]));
      if (!f[10].empty()) r.wall_ms = std::stod(f[10]);
    } catch (const std::logic_error&) {
      fail("malformed number in results line: " + line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> to_rows(const std::string& scene, const std::vector<ReplicateResult>& results,
                               bool timing) {
  std::vector<ResultRow> rows;
  for (const ReplicateResult& t : results) {
    ResultRow r;
    r.scene = scene;
    r.method = std::string(to_string(t.spec.method));
    r.points = t.spec.points_label();
    r.variant = std::string(to_string(t.spec.variant));
    r.n = t.n;
    r.replicate = t.replicate;
    r.seed = t.seed;
    r.estimate = t.record.estimate;
    r.mean_steps = t.record.mean_steps;
    r.max_steps = t.record.max_steps;
    if (timing) r.wall_ms = t.wall_ms;
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

using GroupKey = std::tuple<std::string, std::string, std::string, std::size_t>;

std::map<GroupKey, std::vector<double>> group_estimates(const std::vector<ResultRow>& rows) {
  std::map<GroupKey, std::vector<double>> g;
  for (const ResultRow& r : rows) {
    const std::string pts = r.variant == "move-to-end" ? r.points : r.points + "@" + r.variant;
    g[{r.scene, r.method, pts, r.n}].push_back(r.estimate);
  }
  return g;
}

double fit_value(const std::vector<double>& est, std::optional<double> truth) {
  return truth ? mean_squared_error(est, *truth) : sample_stats(est).variance;
}

}  // namespace

std::vector<RateRow> rate_report(const std::vector<ResultRow>& rows, std::optional<double> truth) {
  const auto groups = group_estimates(rows);
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::pair<double, double>>> series;
  for (const auto& [key, est] : groups) {
    if (est.size() < 2) continue;
    const auto& [scene, method, pts, n] = key;
    series[{scene, method, pts}].emplace_back(static_cast<double>(n), fit_value(est, truth));
  }
  std::map<std::tuple<std::string, std::string, std::string>, LogLogFit> fits;
  for (const auto& [key, pts] : series) {
    try {
      fits[key] = fit_loglog(pts);
    } catch (const std::invalid_argument&) {
      // Too few eligible sample sizes; the rows keep empty fit fields.
    }
  }

  std::vector<RateRow> out;
  for (const auto& [key, est] : groups) {
    const auto& [scene, method, pts, n] = key;
    RateRow r{scene, method, pts, n, {}, {}, {}, {}, {}};
    if (est.size() >= 2) r.variance = sample_stats(est).variance;
    if (truth) r.mse = mean_squared_error(est, *truth);
    if (auto f = fits.find({scene, method, pts}); f != fits.end()) {
      r.slope = f->second.slope;
      r.intercept = f->second.intercept;
    }
    if (auto mc = groups.find({scene, "mc", "mc", n}); mc != groups.end() && est.size() >= 2 &&
                                                       mc->second.size() >= 2) {
      try {
        r.vrf_vs_mc = reduction_factor(est, mc->second, truth).value;
      } catch (const std::invalid_argument&) {
      }
    }
    out.push_back(std::move(r));
  }

  // Pooled sobol+lattice fits.
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> pooled;
  std::map<std::pair<std::string, std::string>, int> sources;
  for (const auto& [key, pts] : series) {
    const auto& [scene, method, p] = key;
    if (p != "sobol" && p != "lattice") continue;
    auto& v = pooled[{scene, method}];
    v.insert(v.end(), pts.begin(), pts.end());
    ++sources[{scene, method}];
  }
  for (const auto& [key, pts] : pooled) {
    if (sources[key] < 2) continue;
    try {
      const LogLogFit f = fit_loglog(pts);
      out.push_back({key.first, key.second, "sobol+lattice", std::nullopt, std::nullopt, std::nullopt,
                     f.slope, f.intercept, std::nullopt});
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << kRatesHeader << "\n";
  for (const RateRow& r : rows) {
    out << csv_field(r.scene) << ',' << r.method << ',' << csv_field(r.points) << ','
        << (r.n ? std::to_string(*r.n) : std::string()) << ',' << opt(r.variance) << ',' << opt(r.mse)
        << ',' << opt(r.slope) << ',' << opt(r.intercept) << ',' << opt(r.vrf_vs_mc) << "\n";
  }
}

void write_rate_plots(const std::filesystem::path& dir, const std::vector<ResultRow>& rows,
                      const std::vector<RateRow>& rates) {
  std::filesystem::create_directories(dir);
  std::map<std::pair<std::string, std::string>, std::vector<const RateRow*>> by;
  for (const RateRow& r : rates)
    if (r.n) by[{r.method, r.points}].push_back(&r);
  (void)rows;
  for (const auto& [key, list] : by) {
    std::string name = "rates_" + key.first + "_" + key.second + ".dat";
    std::replace(name.begin(), name.end(), '@', '_');
    std::ofstream f(dir / name);
    if (!f) fail("cannot write " + (dir / name).string());
    f << "# n variance mse fitted\n";
    for (const RateRow* r : list) {
      const double fitted = r->slope ? std::exp(*r->intercept) * std::pow(static_cast<double>(*r->n), *r->slope)
                                     : std::nan("");
      f << *r->n << ' ' << (r->variance ? format_double(*r->variance) : "nan") << ' '
        << (r->mse ? format_double(*r->mse) : "nan") << ' ' << format_double(fitted) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<KsRow> ks_study(const ExperimentConfig& cfg, const std::vector<MethodSpec>& specs,
                            const std::vector<double>& ts) {
  const Scene disk = unit_disk();
  std::vector<KsRow> out;
  for (double t : ts) {
    if (!(std::abs(t) < 1.0)) fail("KS start point t must satisfy |t| < 1");
    ExperimentConfig c = cfg;
    c.z0 = Vec3{t, 0.0, 0.0};
    const Vec3 z{t, 0.0, 0.0};
    // Distinct streams per start point.
    c.seed = derive_seed(cfg.seed, hash_label("ks/" + format_double(t)));
    const auto results = run_replicates(disk, c, specs, true);
    std::map<std::pair<std::string, std::size_t>, std::vector<double>> ks;
    std::vector<std::pair<std::string, std::size_t>> order;
    for (const ReplicateResult& r : results) {
      std::vector<double> ang(r.record.terminal_points.size());
      for (std::size_t i = 0; i < ang.size(); ++i) ang[i] = terminal_angle(r.record.terminal_points[i]);
      auto key = std::make_pair(r.spec.label(), r.n);
      if (!ks.count(key)) order.push_back(key);
      ks[key].push_back(ks_distance(ang, z));
    }
    for (const auto& key : order) {
      const SampleStats s = sample_stats(ks[key]);
      MethodSpec spec;
      for (const auto& sp : specs)
        if (sp.label() == key.first) spec = sp;
      out.push_back({t, std::string(to_string(spec.method)), spec.points_label(), key.second, s.mean, s.se,
                     ks_reference_mc(key.second), ks_reference_opt(key.second)});
    }
  }
  return out;
}

void write_ks_csv(std::ostream& out, const std::vector<KsRow>& rows) {
  out << kKsHeader << "\n";
  for (const KsRow& r : rows)
    out << format_double(r.t) << ',' << r.method << ',' << r.points << ',' << r.n << ','
        << format_double(r.mean_ks) << ',' << format_double(r.se_ks) << ',' << format_double(r.ref_mc)
        << ',' << format_double(r.ref_opt) << "\n";
}

std::vector<SobolRow> sobol_study(const ExperimentConfig& cfg, const std::vector<MethodSpec>& specs,
                                  int kprime) {
  std::vector<SobolRow> out;
  const std::size_t n = cfg.ns.empty() ? 4096 : cfg.ns.front();
  if (cfg.scene == "synthetic-additive" || cfg.scene == "synthetic-product") {
    const bool add = cfg.scene == "synthetic-additive";
    const int cols = add ? kprime : 2;
    const auto F = add ? synthetic_additive(n, cols) : synthetic_product(n);
    SobolRow row{cfg.scene, "synthetic", "mc",
                 jansen_indices(F, static_cast<std::size_t>(std::max(cols, kprime)), kprime, cfg.reps, cfg.seed)};
    out.push_back(std::move(row));
    return out;
  }
  const Scene scene = resolve_scene(cfg.scene);
  for (const MethodSpec& spec : specs) {
    const WalkEngine engine(scene, make_run_config(cfg, spec, n, 0));
    const int kp = std::min(kprime, engine.max_steps());
    const std::uint64_t seed = derive_seed(cfg.seed, hash_label("sobol/" + spec.label()));
    out.push_back({scene.name, std::string(to_string(spec.method)), spec.points_label(),
                   jansen_wos(engine, kp, cfg.reps, seed, resolve_threads(cfg.threads))});
  }
  return out;
}

void write_sobol_csv(std::ostream& out, const std::vector<SobolRow>& rows) {
  out << kSobolHeader << "\n";
  for (const SobolRow& r : rows) {
    const auto norm = r.report.tau2_normalized();
    double cum = 0.0;
    for (std::size_t k = 0; k < r.report.tau2.size(); ++k) {
      cum += std::max(norm[k], 0.0);
      out << csv_field(r.scene) << ',' << r.method << ',' << r.points << ',' << k + 1 << ','
          << format_double(r.report.tau2[k]) << ',' << format_double(norm[k]) << ','
          << format_double(r.report.sigma2) << ',' << format_double(cum) << "\n";
    }
  }
}

void write_sobol_summary(std::ostream& out, const std::vector<SobolRow>& rows) {
  auto find = [&](const std::string& method, const std::string& points) -> const SobolRow* {
    for (const SobolRow& r : rows)
      if (r.method == method && r.points == points) return &r;
    return nullptr;
  };
  auto cell = [&](const SobolRow* r) {
    if (!r) return std::string("-");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f (%.2f)", r->report.nu, r->report.nu_se);
    return std::string(buf);
  };
  out << "# mean dimension nu (jackknife SE); columns: plain, array\n";
  const std::pair<const char*, const char*> base[] = {{"mc", "mc"}, {"rqmc", "sobol"}, {"rqmc", "lattice"}};
  const char* labels[] = {"MC", "Sobol", "Lattice"};
  for (int i = 0; i < 3; ++i) {
    const SobolRow* plain = find(base[i].first, base[i].second);
    const SobolRow* arr = i == 0 ? find("array-mc", "mc") : find("array-rqmc", base[i].second);
    out << labels[i] << '\t' << cell(plain) << '\t' << cell(arr) << "\n";
  }
}

}  // namespace arraywos
