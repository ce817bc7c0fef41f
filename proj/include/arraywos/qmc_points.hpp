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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "arraywos/rng.hpp"

namespace arraywos {

enum class Construction { MC, Sobol, KuoLattice, Fibonacci, Stratified, Hammersley };

std::string_view to_string(Construction c);
Construction parse_construction(std::string_view name);

// Row-major n x s matrix of points in [0,1)^s.
class PointMatrix {
 public:
  PointMatrix() = default;
  PointMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double> column(std::size_t j) const;

  std::span<const double> values() const { return data_; }

  bool operator==(const PointMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct RandomizedPointSet {
  PointMatrix points;
  Construction construction = Construction::MC;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.rows(); }
  std::size_t dimension() const { return points.cols(); }
};

// ---------------------------------------------------------------------------
// Sobol' direction numbers (new-joe-kuo-6 text format).

struct DirectionNumbers {
  int degree = 0;             // s
  std::uint32_t coefficients = 0;  // a, interior bits of the primitive polynomial
  std::vector<std::uint32_t> initial;  // m_1..m_s, odd, m_j < 2^j
};

class DirectionNumberTable {
 public:
  // Lines `d s a m_1 ... m_s`; an optional header line is skipped.
  // Dimension 1 (van der Corput) is implicit and never appears in the file.
  static DirectionNumberTable parse(std::istream& in);
  static DirectionNumberTable from_file(const std::filesystem::path& path);
  // First 1024 dimensions of the Joe-Kuo new-joe-kuo-6.21201 table.
  static const DirectionNumberTable& builtin();

  std::size_t max_dimension() const { return entries_.size() + 1; }

  // 0-based coordinate index; coordinate 0 is the van der Corput column.
  // Returns the first `count` direction integers m_1..m_count.
  std::vector<std::uint64_t> direction_integers(std::size_t coordinate, int count) const;

 private:
  std::vector<DirectionNumbers> entries_;  // coordinate j >= 1 lives at j-1
};

// ---------------------------------------------------------------------------
// Rank-1 lattice generating vector (one integer per line).

class GeneratingVector {
 public:
  explicit GeneratingVector(std::vector<std::uint64_t> z);
  static GeneratingVector parse(std::istream& in);
  static GeneratingVector from_file(const std::filesystem::path& path);
  // First 1024 entries of lattice-33002-1024-1048576.9125 (order-3 weights).
  static const GeneratingVector& builtin();

  std::size_t size() const { return z_.size(); }
  std::uint64_t operator[](std::size_t j) const { return z_[j]; }
  std::span<const std::uint64_t> values() const { return z_; }

 private:
  std::vector<std::uint64_t> z_;
};

// ---------------------------------------------------------------------------
// Base-2 digital nets with 53-bit digit vectors.

inline constexpr int kDigitBits = 53;

// Generating matrices of a digital net. Column c of coordinate j is stored as
// a 53-bit integer whose most significant bit is the first output digit.
class DigitalNet {
 public:
  static DigitalNet sobol(std::size_t n, std::size_t s,
                          const DirectionNumberTable& table = DirectionNumberTable::builtin());

  std::size_t size() const { return std::size_t{1} << m_; }
  int log2_size() const { return m_; }
  std::size_t dimension() const { return s_; }

  std::span<const std::uint64_t> columns(std::size_t j) const {
    return {cols_.data() + j * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }

  // Unrandomized digits of point i (0-based, natural order) in coordinate j.
  std::uint64_t digits(std::size_t i, std::size_t j) const;

 private:
  int m_ = 0;
  std::size_t s_ = 0;
  std::vector<std::uint64_t> cols_;
};

// Linear matrix scramble plus digital shift for one coordinate. Row l of the
// lower-triangular matrix is a mask over the first l+1 digits with the
// diagonal bit set.
class DigitalScramble {
 public:
  static DigitalScramble identity(int precision = kDigitBits);
  static DigitalScramble random(std::uint64_t seed, int precision = kDigitBits);

  std::uint64_t apply_matrix(std::uint64_t v) const;
  std::uint64_t shift() const { return shift_; }
  int precision() const { return precision_; }

  // L*C for every generating column.
  std::vector<std::uint64_t> scramble_columns(std::span<const std::uint64_t> cols) const;

 private:
  int precision_ = kDigitBits;
  std::array<std::uint64_t, kDigitBits> rows_{};
  std::uint64_t shift_ = 0;
};

// Point i of a net with scrambled generating columns, as a 53-bit integer.
std::uint64_t net_point_digits(std::span<const std::uint64_t> scrambled_cols, std::uint64_t shift,
                               std::size_t i);

inline double digits_to_unit(std::uint64_t digits) {
  return static_cast<double>(digits) * 0x1p-53;
}

// First n points of the Sobol' sequence in natural order (n = 2^m).
PointMatrix generate_sobol(std::size_t n, std::size_t s,
                           const DirectionNumberTable& table = DirectionNumberTable::builtin());

// Matousek linear matrix scramble followed by a digital shift, independent
// per coordinate. The scramble seed of coordinate j is derive_seed(seed, j).
RandomizedPointSet scramble_matousek(const DigitalNet& net, std::uint64_t seed,
                                     int precision = kDigitBits);

// ---------------------------------------------------------------------------
// Lattices and shifts.

// Point i has coordinate j equal to (i*z_j mod n)/n, i = 0..n-1.
PointMatrix generate_lattice(std::size_t n, std::size_t s,
                             const GeneratingVector& gv = GeneratingVector::builtin());

// x + delta mod 1, exact whenever both operands lie on the 2^-53 grid.
double shift_mod1(double x, double delta);

// Componentwise x + Delta mod 1 with Delta_j = uniform from derive_seed(seed, j).
RandomizedPointSet random_shift(PointMatrix points, std::uint64_t seed,
                                Construction tag = Construction::KuoLattice);
void apply_shift(PointMatrix& points, std::span<const double> delta);
std::vector<double> draw_shift(std::size_t s, std::uint64_t seed);

// F_1 = F_2 = 1. Valid for 1 <= r <= 93.
std::uint64_t fibonacci_number(int r);
// Smallest r >= 3 with F_r >= m.
int fibonacci_index_at_least(std::uint64_t m);
inline constexpr int kMaxFibonacciIndex = 47;  // keeps (i * F_{r-1}) below 2^64

// x_i = (i/F_r, {i F_{r-1} / F_r}), i = 0..F_r-1. Unrandomized.
PointMatrix fibonacci_lattice(int r);

// Golden-ratio multiplier: start at max(round(m/phi) mod m, 2) and advance
// (wrapping to 2) until gcd(a, m) = 1. For m <= 2 every residue set is the
// same and a = 1 is returned.
std::uint64_t golden_multiplier(std::uint64_t m);

// x_i = ((a i mod m) + Delta) / m with one shared Delta ~ U[0,1).
RandomizedPointSet stratified_shifted_1d(std::uint64_t m, std::uint64_t seed);
// Same with Delta given explicitly.
PointMatrix stratified_points(std::uint64_t m, double delta);

// Radical inverse of i in the given base.
double radical_inverse(std::uint64_t i, unsigned base);

// Hammersley set with m rows: column 0 is i/m, columns 1..s-1 are Halton in
// bases 2, 3, 5 with an independent random base-b digital shift per column.
// s <= 4.
RandomizedPointSet hammersley(std::size_t m, std::size_t s, std::uint64_t seed);
PointMatrix hammersley_unshifted(std::size_t m, std::size_t s);

// IID uniforms; row i comes from the stream derive_seed(seed, i).
RandomizedPointSet mc_points(std::size_t n, std::size_t s, std::uint64_t seed);
void fill_uniform_row(std::span<double> row, std::uint64_t stream_seed);

// True when every column holds exactly one value in each [c/n, (c+1)/n).
bool has_latin_hypercube_columns(const PointMatrix& points);

bool is_power_of_two(std::uint64_t n);
int log2_exact(std::uint64_t n);

}  // namespace arraywos
