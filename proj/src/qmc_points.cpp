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

#include "arraywos/qmc_points.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "embedded_data.hpp"

namespace arraywos {

namespace {

constexpr std::uint64_t kDigitMask = (std::uint64_t{1} << kDigitBits) - 1;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::MC: return "mc";
    case Construction::Sobol: return "sobol";
    case Construction::KuoLattice: return "lattice";
    case Construction::Fibonacci: return "fibonacci";
    case Construction::Stratified: return "stratified";
    case Construction::Hammersley: return "hammersley";
  }
  return "?";
}

Construction parse_construction(std::string_view name) {
  if (name == "mc" || name == "iid") return Construction::MC;
  if (name == "sobol") return Construction::Sobol;
  if (name == "lattice" || name == "kuo") return Construction::KuoLattice;
  if (name == "fibonacci") return Construction::Fibonacci;
  if (name == "stratified") return Construction::Stratified;
  if (name == "hammersley") return Construction::Hammersley;
  fail("unknown point construction '" + std::string(name) +
       "' (expected mc, sobol, lattice, fibonacci, stratified, hammersley)");
}

bool is_power_of_two(std::uint64_t n) { return std::has_single_bit(n); }

int log2_exact(std::uint64_t n) {
  if (!is_power_of_two(n)) fail("n = " + std::to_string(n) + " is not a power of two");
  return std::countr_zero(n);
}

std::vector<double> PointMatrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

// ---------------------------------------------------------------------------

DirectionNumberTable DirectionNumberTable::parse(std::istream& in) {
  DirectionNumberTable table;
  std::string line;
  std::size_t expect = 2;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::uint64_t d = 0;
    if (!(ls >> d)) continue;  // header or blank
    DirectionNumbers e;
    std::uint64_t a = 0;
    if (!(ls >> e.degree >> a) || e.degree < 1 || e.degree > 31)
      fail("malformed direction-number line: " + line);
    if (d != expect) fail("direction-number file out of order at dimension " + std::to_string(d));
    e.coefficients = static_cast<std::uint32_t>(a);
    for (int j = 1; j <= e.degree; ++j) {
      std::uint64_t m = 0;
      if (!(ls >> m)) fail("missing m_" + std::to_string(j) + " for dimension " + std::to_string(d));
      if (m % 2 == 0 || m >= (std::uint64_t{1} << j))
        fail("invalid m_" + std::to_string(j) + " for dimension " + std::to_string(d));
      e.initial.push_back(static_cast<std::uint32_t>(m));
    }
    table.entries_.push_back(std::move(e));
    ++expect;
  }
  return table;
}

DirectionNumberTable DirectionNumberTable::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open direction-number file " + path.string());
  return parse(in);
}

const DirectionNumberTable& DirectionNumberTable::builtin() {
  static const DirectionNumberTable table = [] {
    std::istringstream in{std::string(embedded::joe_kuo_directions())};
    return parse(in);
  }();
  return table;
}

std::vector<std::uint64_t> DirectionNumberTable::direction_integers(std::size_t coordinate,
                                                                    int count) const {
  if (coordinate >= max_dimension())
    fail("Sobol' dimension " + std::to_string(coordinate + 1) + " exceeds table capacity " +
         std::to_string(max_dimension()));
  std::vector<std::uint64_t> m(static_cast<std::size_t>(count), 1);
  if (coordinate == 0) return m;
  const DirectionNumbers& e = entries_[coordinate - 1];
  const int s = e.degree;
  for (int k = 0; k < count; ++k) {
    if (k < s) {
      m[k] = e.initial[k];
      continue;
    }
    std::uint64_t v = m[k - s] ^ (m[k - s] << s);
    for (int i = 1; i < s; ++i)
      if ((e.coefficients >> (s - 1 - i)) & 1U) v ^= m[k - i] << i;
    m[k] = v;
  }
  return m;
}

// ---------------------------------------------------------------------------

GeneratingVector::GeneratingVector(std::vector<std::uint64_t> z) : z_(std::move(z)) {
  if (z_.empty() || z_[0] != 1) fail("generating vector must start with z_1 = 1");
  for (std::uint64_t v : z_)
    if (v == 0) fail("generating vector entries must be positive");
}

GeneratingVector GeneratingVector::parse(std::istream& in) {
  std::vector<std::uint64_t> z;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::uint64_t v = 0;
    if (ls >> v) z.push_back(v);
  }
  return GeneratingVector(std::move(z));
}

GeneratingVector GeneratingVector::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open generating-vector file " + path.string());
  return parse(in);
}

const GeneratingVector& GeneratingVector::builtin() {
  static const GeneratingVector gv = [] {
    std::istringstream in{std::string(embedded::kuo_lattice_vector())};
    return parse(in);
  }();
  return gv;
}

// ---------------------------------------------------------------------------

DigitalNet DigitalNet::sobol(std::size_t n, std::size_t s, const DirectionNumberTable& table) {
  const int m = log2_exact(n);
  if (m > 31) fail("Sobol' point count above 2^31");
  if (s > table.max_dimension())
    fail("Sobol' dimension " + std::to_string(s) + " exceeds table capacity " +
         std::to_string(table.max_dimension()));
  DigitalNet net;
  net.m_ = m;
  net.s_ = s;
  net.cols_.resize(s * static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < s; ++j) {
    auto mj = table.direction_integers(j, m);
    for (int c = 0; c < m; ++c)
      net.cols_[j * m + c] = mj[c] << (kDigitBits - 1 - c);
  }
  return net;
}

std::uint64_t DigitalNet::digits(std::size_t i, std::size_t j) const {
  return net_point_digits(columns(j), 0, i);
}

std::uint64_t net_point_digits(std::span<const std::uint64_t> cols, std::uint64_t shift,
                               std::size_t i) {
  std::uint64_t v = shift;
  for (std::size_t c = 0; i != 0; ++c, i >>= 1)
    if (i & 1U) v ^= cols[c];
  return v;
}

DigitalScramble DigitalScramble::identity(int precision) {
  if (precision < 1 || precision > kDigitBits)
    fail("scramble precision must lie in [1, 53], got " + std::to_string(precision));
  DigitalScramble sc;
  sc.precision_ = precision;
  for (int l = 0; l < precision; ++l) sc.rows_[l] = std::uint64_t{1} << (kDigitBits - 1 - l);
  return sc;
}

DigitalScramble DigitalScramble::random(std::uint64_t seed, int precision) {
  DigitalScramble sc = identity(precision);
  SplitMix64 rng(seed);
  for (int l = 1; l < precision; ++l) {
    // Random bits on the l more significant digits, diagonal kept at 1.
    const std::uint64_t above = rng.bits(l) << (kDigitBits - l);
    sc.rows_[l] |= above;
  }
  sc.shift_ = rng.bits(precision) << (kDigitBits - precision);
  return sc;
}

std::uint64_t DigitalScramble::apply_matrix(std::uint64_t v) const {
  std::uint64_t out = 0;
  for (int l = 0; l < precision_; ++l)
    out |= static_cast<std::uint64_t>(std::popcount(rows_[l] & v) & 1) << (kDigitBits - 1 - l);
  return out;
}

std::vector<std::uint64_t> DigitalScramble::scramble_columns(
    std::span<const std::uint64_t> cols) const {
  std::vector<std::uint64_t> out(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) out[c] = apply_matrix(cols[c] & kDigitMask);
  return out;
}

PointMatrix generate_sobol(std::size_t n, std::size_t s, const DirectionNumberTable& table) {
  const DigitalNet net = DigitalNet::sobol(n, s, table);
  PointMatrix pts(n, s);
  for (std::size_t j = 0; j < s; ++j) {
    auto cols = net.columns(j);
    // Gray-code walk: gray(i) differs from gray(i-1) in bit ctz(i).
    std::uint64_t v = 0;
    for (std::size_t i = 1; i < n; ++i) {
      v ^= cols[std::countr_zero(i)];
      pts(i ^ (i >> 1), j) = digits_to_unit(v);
    }
  }
  return pts;
}

RandomizedPointSet scramble_matousek(const DigitalNet& net, std::uint64_t seed, int precision) {
  const std::size_t n = net.size();
  const std::size_t s = net.dimension();
  RandomizedPointSet out{PointMatrix(n, s), Construction::Sobol, seed};
  for (std::size_t j = 0; j < s; ++j) {
    const DigitalScramble sc = DigitalScramble::random(derive_seed(seed, j), precision);
    const auto cols = sc.scramble_columns(net.columns(j));
    std::uint64_t v = sc.shift();
    out.points(0, j) = digits_to_unit(v);
    for (std::size_t i = 1; i < n; ++i) {
      v ^= cols[std::countr_zero(i)];
      out.points(i ^ (i >> 1), j) = digits_to_unit(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

PointMatrix generate_lattice(std::size_t n, std::size_t s, const GeneratingVector& gv) {
  if (n == 0) fail("lattice needs n >= 1");
  if (s > gv.size())
    fail("lattice dimension " + std::to_string(s) + " exceeds generating vector length " +
         std::to_string(gv.size()));
  PointMatrix pts(n, s);
  const auto nd = static_cast<double>(n);
  for (std::size_t j = 0; j < s; ++j) {
    const std::uint64_t z = gv[j] % n;
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pts(i, j) = static_cast<double>(r) / nd;
      r += z;
      if (r >= n) r -= n;
    }
  }
  return pts;
}

double shift_mod1(double x, double delta) {
  const double r = (x - 1.0) + delta;
  if (r >= 0.0) return r;
  const double y = x + delta;
  return y < 1.0 ? y : std::nextafter(1.0, 0.0);
}

std::vector<double> draw_shift(std::size_t s, std::uint64_t seed) {
  std::vector<double> delta(s);
  for (std::size_t j = 0; j < s; ++j) delta[j] = SplitMix64(derive_seed(seed, j)).uniform();
  return delta;
}

void apply_shift(PointMatrix& points, std::span<const double> delta) {
  for (std::size_t i = 0; i < points.rows(); ++i)
    for (std::size_t j = 0; j < points.cols(); ++j) points(i, j) = shift_mod1(points(i, j), delta[j]);
}

RandomizedPointSet random_shift(PointMatrix points, std::uint64_t seed, Construction tag) {
  apply_shift(points, draw_shift(points.cols(), seed));
  return {std::move(points), tag, seed};
}

std::uint64_t fibonacci_number(int r) {
  if (r < 1 || r > 93) fail("Fibonacci index out of range");
  std::uint64_t a = 1, b = 1;
  for (int k = 2; k < r; ++k) {
    const std::uint64_t c = a + b;
    a = b;
    b = c;
  }
  return b;
}

int fibonacci_index_at_least(std::uint64_t m) {
  int r = 3;
  while (fibonacci_number(r) < m) {
    if (++r > kMaxFibonacciIndex) fail("no usable Fibonacci lattice with at least " +
                                      std::to_string(m) + " points");
  }
  return r;
}

PointMatrix fibonacci_lattice(int r) {
  if (r < 3) fail("Fibonacci lattice needs r >= 3");
  if (r > kMaxFibonacciIndex) fail("Fibonacci index " + std::to_string(r) + " too large");
  return generate_lattice(fibonacci_number(r), 2,
                          GeneratingVector({1, fibonacci_number(r - 1)}));
}

std::uint64_t golden_multiplier(std::uint64_t m) {
  if (m <= 2) return 1;
  const double ratio = static_cast<double>(m) / std::numbers::phi;
  std::uint64_t a = static_cast<std::uint64_t>(std::llround(ratio)) % m;
  a = std::max<std::uint64_t>(a, 2);
  while (std::gcd(a, m) != 1) {
    if (++a >= m) a = 2;
  }
  return a;
}

PointMatrix stratified_points(std::uint64_t m, double delta) {
  if (m == 0) fail("stratified set needs m >= 1");
  const std::uint64_t a = golden_multiplier(m);
  PointMatrix pts(m, 1);
  const double md = static_cast<double>(m);
  std::uint64_t r = 0;
  for (std::uint64_t i = 0; i < m; ++i) {
    pts(i, 0) = std::min((static_cast<double>(r) + delta) / md, std::nextafter(1.0, 0.0));
    r = (r + a) % m;
  }
  return pts;
}

RandomizedPointSet stratified_shifted_1d(std::uint64_t m, std::uint64_t seed) {
  return {stratified_points(m, SplitMix64(seed).uniform()), Construction::Stratified, seed};
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, scale = inv, x = 0.0;
  while (i != 0) {
    x += static_cast<double>(i % base) * scale;
    i /= base;
    scale *= inv;
  }
  return x;
}

namespace {

constexpr unsigned kHaltonBases[] = {2, 3, 5};

int digit_count(unsigned base) {
  // Enough base-b digits to exhaust double resolution.
  return base == 2 ? 53 : base == 3 ? 34 : 23;
}

double shifted_radical_inverse(std::uint64_t i, unsigned base, std::span<const unsigned> shift) {
  double inv = 1.0 / base, scale = inv, x = 0.0;
  for (unsigned d : shift) {
    x += static_cast<double>((i % base + d) % base) * scale;
    i /= base;
    scale *= inv;
  }
  return std::min(x, std::nextafter(1.0, 0.0));
}

}  // namespace

PointMatrix hammersley_unshifted(std::size_t m, std::size_t s) {
  if (s < 1 || s > 4) fail("Hammersley dimension must lie in [1, 4]");
  PointMatrix pts(m, s);
  for (std::size_t i = 0; i < m; ++i) {
    pts(i, 0) = static_cast<double>(i) / static_cast<double>(m);
    for (std::size_t j = 1; j < s; ++j) pts(i, j) = radical_inverse(i, kHaltonBases[j - 1]);
  }
  return pts;
}

RandomizedPointSet hammersley(std::size_t m, std::size_t s, std::uint64_t seed) {
  RandomizedPointSet out{hammersley_unshifted(m, s), Construction::Hammersley, seed};
  for (std::size_t j = 1; j < s; ++j) {
    const unsigned b = kHaltonBases[j - 1];
    std::vector<unsigned> shift(digit_count(b));
    SplitMix64 rng(derive_seed(seed, j));
    for (unsigned& d : shift) d = static_cast<unsigned>(rng() % b);
    for (std::size_t i = 0; i < m; ++i) out.points(i, j) = shifted_radical_inverse(i, b, shift);
  }
  return out;
}

void fill_uniform_row(std::span<double> row, std::uint64_t stream_seed) {
  SplitMix64 rng(stream_seed);
  for (double& x : row) x = rng.uniform();
}

RandomizedPointSet mc_points(std::size_t n, std::size_t s, std::uint64_t seed) {
  RandomizedPointSet out{PointMatrix(n, s), Construction::MC, seed};
  for (std::size_t i = 0; i < n; ++i) fill_uniform_row(out.points.row(i), derive_seed(seed, i));
  return out;
}

bool has_latin_hypercube_columns(const PointMatrix& points) {
  const std::size_t n = points.rows();
  std::vector<char> seen(n);
  for (std::size_t j = 0; j < points.cols(); ++j) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = points(i, j);
      if (!(x >= 0.0 && x < 1.0)) return false;
      const double nd = static_cast<double>(n);
      auto c = static_cast<std::size_t>(std::floor(x * nd));
      // x * n can round across a stratum edge; settle it against c / n.
      if (c > 0 && x < static_cast<double>(c) / nd) --c;
      else if (c + 1 < n && x >= static_cast<double>(c + 1) / nd) ++c;
      if (c >= n || seen[c]) return false;
      seen[c] = 1;
    }
  }
  return true;
}

}  // namespace arraywos
