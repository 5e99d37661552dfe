#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "nlpme/errors.hpp"

namespace nlpme {

/// Uniform periodic grid on [-L, L)^d with n points per dimension.
struct Grid {
  int d = 1;
  double L = 1.0;
  std::size_t n = 64;

  void validate() const {
    if (d < 1 || d > 2) throw domain_error("Grid: only d = 1 or 2 is supported for fields");
    if (!(L > 0.0) || !std::isfinite(L)) throw domain_error("Grid: L must be > 0");
    if (n < 8 || (n & (n - 1)) != 0) throw domain_error("Grid: n must be a power of two >= 8");
  }

  double h() const { return 2.0 * L / static_cast<double>(n); }
  double cell_volume() const { return std::pow(h(), d); }
  std::size_t size() const { return d == 1 ? n : n * n; }
  double coordinate(std::size_t i) const { return -L + static_cast<double>(i) * h(); }

  /// Signed integer wavenumber of FFT slot i, in [-n/2, n/2).
  long wavenumber(std::size_t i) const {
    const long k = static_cast<long>(i);
    const long half = static_cast<long>(n / 2);
    return k < half ? k : k - static_cast<long>(n);
  }
  double frequency(std::size_t i) const { return std::numbers::pi / L * static_cast<double>(wavenumber(i)); }
  bool is_nyquist(std::size_t i) const { return i == n / 2; }

  /// Coordinates of flat index idx (row-major, last index fastest).
  std::array<double, 2> point(std::size_t idx) const {
    if (d == 1) return {coordinate(idx), 0.0};
    return {coordinate(idx / n), coordinate(idx % n)};
  }

  bool operator==(const Grid&) const = default;
};

/// Real samples on a grid.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw domain_error("Field: value count does not match grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// d real component arrays on a grid.
struct VectorField {
  Grid grid;
  std::vector<std::vector<double>> components;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g), components(static_cast<std::size_t>(g.d), std::vector<double>(g.size(), 0.0)) {}
};

/// Samples f(point) at every grid node; f takes a std::span<const double> of length d.
template <class F>
Field sample_field(const Grid& grid, F&& f) {
  grid.validate();
  Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    out[i] = f(std::span<const double>(p.data(), static_cast<std::size_t>(grid.d)));
  }
  return out;
}

/// Grid inner product sum f_i g_i h^d.
inline double inner_product(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw domain_error("inner_product: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid.cell_volume();
}

inline double mean(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s / static_cast<double>(f.size());
}

}  // namespace nlpme
