#pragma once

// Exact self-similar (Barenblatt-type) solutions
//   u(t,x) = t^{-d lambda} Phi(x t^{-lambda}),  Phi(y) = (k (R^2 - |y|^2)_+^{alpha/2})^{1/(m-1)}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "nlpme/errors.hpp"
#include "nlpme/specfun.hpp"

namespace nlpme {

struct BarenblattSpec {
  MediumParams params;
  double R = 1.0;  // support radius in the similarity variable

  void validate() const {
    params.validate();
    if (!(R > 0.0) || !std::isfinite(R)) throw domain_error("BarenblattSpec: R must be > 0");
  }
};

namespace detail {

inline double squared_norm(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

inline void check_point_dim(const MediumParams& p, std::span<const double> y) {
  if (y.size() != static_cast<std::size_t>(p.d)) throw domain_error("point dimension does not match d");
}

// int_{B_1} (1 - |z|^2)^s dz
inline double ball_power_integral(int d, double s) {
  return std::pow(std::numbers::pi, 0.5 * d) * gamma_fn(s + 1.0) / gamma_fn(s + 1.0 + 0.5 * d);
}

}  // namespace detail

/// Phi(y); zero on and outside the sphere |y| = R.
inline double phi_value(const BarenblattSpec& spec, std::span<const double> y) {
  detail::check_point_dim(spec.params, y);
  const double gap = spec.R * spec.R - detail::squared_norm(y);
  if (gap <= 0.0) return 0.0;
  const double k = barenblatt_k(spec.params);
  return std::pow(k * std::pow(gap, 0.5 * spec.params.alpha), 1.0 / (spec.params.m - 1.0));
}

/// u(t, x) = t^{-d lambda} Phi(x t^{-lambda}).
inline double selfsim_value(const BarenblattSpec& spec, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw domain_error("selfsim_value: t must be > 0");
  detail::check_point_dim(spec.params, x);
  const double lambda = lambda_exponent(spec.params);
  const double scale = std::pow(t, -lambda);
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v *= scale;
  return std::pow(t, -spec.params.d * lambda) * phi_value(spec, y);
}

/// Radius of the support of u(t, .), R t^lambda.
inline double interface_radius(const BarenblattSpec& spec, double t) {
  if (!(t > 0.0)) throw domain_error("interface_radius: t must be > 0");
  return spec.R * std::pow(t, lambda_exponent(spec.params));
}

/// L^p norm of Phi in closed form (p = infinity gives the peak value Phi(0)).
inline double profile_lp_norm(const BarenblattSpec& spec, double p) {
  spec.validate();
  const auto& prm = spec.params;
  const double k = barenblatt_k(prm);
  const double s = prm.alpha / (2.0 * (prm.m - 1.0));
  if (std::isinf(p)) return std::pow(k, 1.0 / (prm.m - 1.0)) * std::pow(spec.R, 2.0 * s);
  if (!(p >= 1.0)) throw domain_error("profile_lp_norm: p must be >= 1");
  const double integral = std::pow(k, p / (prm.m - 1.0)) * std::pow(spec.R, prm.d + 2.0 * s * p) *
                          detail::ball_power_integral(prm.d, s * p);
  return std::pow(integral, 1.0 / p);
}

/// Total mass int Phi dy = k^{1/(m-1)} R^{d + alpha/(m-1)} pi^{d/2} Gamma(s+1)/Gamma(s+1+d/2), s = alpha/(2(m-1)).
inline double profile_mass(const BarenblattSpec& spec) { return profile_lp_norm(spec, 1.0); }

/// The unique R with profile_mass = M.
inline double radius_for_mass(const MediumParams& p, double mass) {
  p.validate();
  if (!(mass > 0.0) || !std::isfinite(mass)) throw domain_error("radius_for_mass: mass must be > 0");
  const double unit_mass = profile_mass(BarenblattSpec{p, 1.0});
  return std::pow(mass / unit_mass, 1.0 / (p.d + p.alpha / (p.m - 1.0)));
}

/// grad^{alpha-1}(u^{m-1})(t, x) = -lambda x / t, valid strictly inside the support.
inline std::vector<double> exact_velocity(const BarenblattSpec& spec, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw domain_error("exact_velocity: t must be > 0");
  detail::check_point_dim(spec.params, x);
  const double front = interface_radius(spec, t);
  if (!(std::sqrt(detail::squared_norm(x)) < front)) {
    throw domain_error("exact_velocity: point is not strictly inside the support");
  }
  const double factor = -lambda_exponent(spec.params) / t;
  std::vector<double> w(x.begin(), x.end());
  for (double& v : w) v *= factor;
  return w;
}

/// Hoelder exponent of the profile at the interface, min{alpha/(2(m-1)), 1}.
inline double holder_exponent(const MediumParams& p) {
  p.validate();
  return std::min(p.alpha / (2.0 * (p.m - 1.0)), 1.0);
}

}  // namespace nlpme
