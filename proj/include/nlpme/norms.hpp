#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlpme/errors.hpp"
#include "nlpme/grid.hpp"

namespace nlpme {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Grid L^p norm (sum |f_i|^p h^d)^{1/p}; p = kInfNorm gives max |f_i|.
inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw domain_error("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 1.0) {
    for (double v : f.values) s += std::abs(v);
    return s * f.grid.cell_volume();
  }
  if (p == 2.0) {
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.cell_volume());
  }
  for (double v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

/// Signed integral sum f_i h^d.
inline double total_mass(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

/// Largest |x_i| over cells with |f_i| > threshold * max|f|; 0 for the zero field.
inline double support_radius(const Field& f, double threshold = 1e-6) {
  if (!(threshold > 0.0)) throw domain_error("support_radius: threshold must be > 0");
  const double peak = lp_norm(f, kInfNorm);
  if (peak == 0.0) return 0.0;
  const double cut = threshold * peak;
  double r2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > cut) {
      const auto p = f.grid.point(i);
      r2 = std::max(r2, p[0] * p[0] + p[1] * p[1]);
    }
  }
  return std::sqrt(r2);
}

}  // namespace nlpme
