#pragma once

// Special functions and closed-form constants for the nonlocal porous medium
// equation  u_t = div(u grad^{alpha-1} |u|^{m-1}).

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "nlpme/errors.hpp"

namespace nlpme {

/// The triple (d, m, alpha) defining the equation.
struct MediumParams {
  int d = 1;
  double m = 2.0;
  double alpha = 1.0;

  /// Throws domain_error unless d >= 1, m > 1 and 0 < alpha <= 2.
  void validate() const {
    if (d < 1) throw domain_error("MediumParams: d must be >= 1");
    if (!(m > 1.0) || !std::isfinite(m)) throw domain_error("MediumParams: m must be > 1");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw domain_error("MediumParams: alpha must lie in (0, 2]");
  }
};

namespace detail {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Lanczos coefficients, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993227684700473478,  676.520368121885098567009190444019,
    -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
    -176.61502916214059906584551354,     12.507343278686904814458936853,
    -0.13857109526572011689554707,       9.984369578019570859563e-6,
    1.50563273514931155834e-7};

inline double lanczos_gamma_positive(double x) {
  // valid for x >= 0.5
  const double xm1 = x - 1.0;
  double acc = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) acc += kLanczosCoef[i] / (xm1 + static_cast<double>(i));
  const double t = xm1 + kLanczosG + 0.5;
  // t^(x-1/2) split in two factors so that large arguments do not overflow early.
  const double half_pow = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) * acc;
}

}  // namespace detail

/// Euler Gamma function. Lanczos approximation with reflection below 1/2.
inline double gamma_fn(double x) {
  if (std::isnan(x)) return x;
  if (detail::is_nonpositive_integer(x)) throw pole_error("gamma_fn: pole at x = " + std::to_string(x));
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * detail::lanczos_gamma_positive(1.0 - x));
  }
  return detail::lanczos_gamma_positive(x);
}

/// 1/Gamma(x); zero at the poles of Gamma.
inline double rgamma(double x) {
  if (detail::is_nonpositive_integer(x)) return 0.0;
  return 1.0 / gamma_fn(x);
}

/// Digamma psi(x) = Gamma'(x)/Gamma(x).
inline double digamma(double x) {
  if (detail::is_nonpositive_integer(x)) throw pole_error("digamma: pole at x = " + std::to_string(x));
  if (x < 0.0) return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  double acc = 0.0;
  while (x < 20.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  const double tail =
      inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
  return acc + std::log(x) - 0.5 / x - tail;
}

namespace detail {

inline constexpr int kMaxSeriesTerms = 500;
inline constexpr double kSeriesRelTol = 1e-16;

// Plain Gauss series, intended for 0 <= z <= 1/2.
inline double hyp2f1_series(double a, double b, double c, double z) {
  double term = 1.0;
  double sum = 1.0;
  int small_in_a_row = 0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    sum += term;
    if (std::abs(term) < kSeriesRelTol * std::abs(sum)) {
      if (++small_in_a_row == 2) return sum;
    } else {
      small_in_a_row = 0;
    }
  }
  throw convergence_error("hyp2f1: series did not converge within 500 terms");
}

// Terminating series when b is a nonpositive integer.
inline double hyp2f1_polynomial(double a, double b, double c, double z) {
  const int degree = static_cast<int>(-b);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < degree; ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    sum += term;
  }
  return sum;
}

// c = a + b + m with m a nonnegative integer, 1/2 < z < 1 (Abramowitz & Stegun 15.3.10-11).
inline double hyp2f1_log_case(double a, double b, int m, double z) {
  const double w = 1.0 - z;
  const double log_w = std::log(w);
  const double c = a + b + m;
  double finite = 0.0;
  if (m > 0) {
    double term = 1.0;
    for (int n = 0; n < m; ++n) {
      if (n > 0) {
        const double dn = static_cast<double>(n - 1);
        term *= (a + dn) * (b + dn) / ((dn + 1.0) * (1.0 - m + dn)) * w;
      }
      finite += term;
    }
    finite *= gamma_fn(static_cast<double>(m)) * gamma_fn(c) * rgamma(a + m) * rgamma(b + m);
  }

  // coefficient (a+m)_n (b+m)_n / (n! (n+m)!) w^n, bracket with digammas
  double coef = 1.0 / gamma_fn(static_cast<double>(m) + 1.0);
  double psi_n1 = digamma(1.0);
  double psi_nm1 = digamma(static_cast<double>(m) + 1.0);
  double psi_a = digamma(a + m);
  double psi_b = digamma(b + m);
  double sum = 0.0;
  int small_in_a_row = 0;
  bool converged = false;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double bracket = log_w - psi_n1 - psi_nm1 + psi_a + psi_b;
    const double term = coef * bracket;
    sum += term;
    if (n > 0 && std::abs(term) < kSeriesRelTol * std::abs(sum)) {
      if (++small_in_a_row == 2) {
        converged = true;
        break;
      }
    } else {
      small_in_a_row = 0;
    }
    const double dn = static_cast<double>(n);
    coef *= (a + m + dn) * (b + m + dn) / ((dn + 1.0) * (dn + m + 1.0)) * w;
    psi_n1 += 1.0 / (dn + 1.0);
    psi_nm1 += 1.0 / (dn + m + 1.0);
    psi_a += 1.0 / (a + m + dn);
    psi_b += 1.0 / (b + m + dn);
  }
  if (!converged) throw convergence_error("hyp2f1: logarithmic series did not converge within 500 terms");

  const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (z - 1)^m = (-w)^m
  const double log_part = sign * std::pow(w, m) * gamma_fn(c) * rgamma(a) * rgamma(b) * sum;
  return finite - log_part;
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; z) for real parameters and z in [0, 1].
///
/// Direct series for z <= 1/2, the 1 - z connection formula above (with the
/// logarithmic variant when c - a - b is an integer), Gauss summation at z = 1,
/// exact finite sum when a or b is a nonpositive integer.
inline double hyp2f1(double a, double b, double c, double z) {
  if (detail::is_nonpositive_integer(c)) throw domain_error("hyp2f1: c must not be a nonpositive integer");
  if (!(z >= 0.0 && z <= 1.0)) throw domain_error("hyp2f1: z must lie in [0, 1]");
  if (detail::is_nonpositive_integer(a)) std::swap(a, b);
  if (detail::is_nonpositive_integer(b)) return detail::hyp2f1_polynomial(a, b, c, z);
  if (z == 0.0) return 1.0;

  const double s = c - a - b;
  if (z == 1.0) {
    if (!(s > 0.0)) throw domain_error("hyp2f1: divergent at z = 1 (c - a - b <= 0)");
    return gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b);
  }
  if (z <= 0.5) return detail::hyp2f1_series(a, b, c, z);

  const double w = 1.0 - z;
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-9) {
    const int m = static_cast<int>(nearest);
    if (m >= 0) return detail::hyp2f1_log_case(a, b, m, z);
    // Euler: F(a,b;c;z) = (1-z)^{c-a-b} F(c-a, c-b; c; z), where the new excess is -m > 0.
    return std::pow(w, s) * hyp2f1(c - a, c - b, c, z);
  }
  const double first = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b) *
                       detail::hyp2f1_series(a, b, 1.0 - s, w);
  const double second = std::pow(w, s) * gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b) *
                        detail::hyp2f1_series(c - a, c - b, s + 1.0, w);
  return first + second;
}

/// Similarity exponent lambda = 1/(d(m-1) + alpha).
inline double lambda_exponent(const MediumParams& p) {
  p.validate();
  return 1.0 / (p.d * (p.m - 1.0) + p.alpha);
}

/// K_{alpha,d} = Gamma(d/2) / (2^alpha Gamma(1+alpha/2) Gamma((d+alpha)/2)), the constant for which
/// K (-Delta)^{alpha/2} (1-|y|^2)_+^{alpha/2} = 1 in the unit ball.
inline double getoor_constant(int d, double alpha) {
  if (d < 1) throw domain_error("getoor_constant: d must be >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw domain_error("getoor_constant: alpha must lie in (0, 2]");
  const double half_d = 0.5 * d;
  return gamma_fn(half_d) / (std::pow(2.0, alpha) * gamma_fn(1.0 + 0.5 * alpha) * gamma_fn(half_d + 0.5 * alpha));
}

/// Amplitude k of the Barenblatt profile, k = d * lambda * K_{alpha,d}.
inline double barenblatt_k(const MediumParams& p) {
  p.validate();
  const double half_d = 0.5 * p.d;
  return (p.d / (p.d * (p.m - 1.0) + p.alpha)) *
         (gamma_fn(half_d) /
          (std::pow(2.0, p.alpha) * gamma_fn(1.0 + 0.5 * p.alpha) * gamma_fn(half_d + 0.5 * p.alpha)));
}

namespace detail {

inline void check_riesz_profile_args(double gamma, double beta, int d) {
  if (d < 1) throw domain_error("riesz_profile: d must be >= 1");
  if (!(gamma > 0.0)) throw domain_error("riesz_profile: gamma must be > 0");
  if (!(beta > 0.0 && beta < 2.0)) throw domain_error("riesz_profile: beta must lie in (0, 2)");
  if (!(beta < d)) throw domain_error("riesz_profile: beta must be < d");
}

inline double riesz_profile_interior(double r, double gamma, double beta, int d) {
  const double half_d = 0.5 * d;
  const double amplitude = std::pow(2.0, -beta) * gamma_fn(0.5 * gamma + 1.0) * gamma_fn(0.5 * (d - beta)) /
                           (gamma_fn(half_d) * gamma_fn(0.5 * (beta + gamma) + 1.0));
  return amplitude * hyp2f1(0.5 * (d - beta), -0.5 * (gamma + beta), half_d, r * r);
}

inline double riesz_profile_exterior_shape(double r, double gamma, double beta, int d) {
  return std::pow(r, beta - d) * hyp2f1(0.5 * (d - beta), 0.5 * (2.0 - beta), 0.5 * (d + gamma) + 1.0, 1.0 / (r * r));
}

}  // namespace detail

/// Amplitude of the exterior branch of I_beta((1-|y|^2)_+^{gamma/2}), fixed by continuity at |y| = 1.
inline double riesz_profile_exterior_constant(double gamma, double beta, int d) {
  detail::check_riesz_profile_args(gamma, beta, d);
  return detail::riesz_profile_interior(1.0, gamma, beta, d) /
         detail::riesz_profile_exterior_shape(1.0, gamma, beta, d);
}

/// Riesz potential I_beta of (1-|y|^2)_+^{gamma/2} in R^d, evaluated at radius r.
///
/// Inside the ball: C 2F1((d-beta)/2, -(gamma+beta)/2; d/2; r^2).
/// Outside: C~ r^{beta-d} 2F1((d-beta)/2, (2-beta)/2; (d+gamma)/2 + 1; 1/r^2), with C~ from continuity.
inline double riesz_profile_closed_form(double r, double gamma, double beta, int d) {
  detail::check_riesz_profile_args(gamma, beta, d);
  if (!(r >= 0.0)) throw domain_error("riesz_profile: r must be >= 0");
  if (r <= 1.0) return detail::riesz_profile_interior(r, gamma, beta, d);
  return riesz_profile_exterior_constant(gamma, beta, d) * detail::riesz_profile_exterior_shape(r, gamma, beta, d);
}

}  // namespace nlpme
