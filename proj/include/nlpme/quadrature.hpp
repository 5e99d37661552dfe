#pragma once

// Direct singular-integral evaluation of (-Delta)^{alpha/2} and I_beta at a point.
// Slow; exists to cross-check the spectral operators and the closed forms.
//
// Both integrals are written in polar coordinates around x,
//   (-Delta)^{alpha/2} f(x) = c_{d,alpha} int_0^inf rho^{-1-alpha} [ |S| f(x) - int_S f(x + rho w) dw ] drho,
//   I_beta f(x)             = C_beta     int_0^inf rho^{beta-1}       int_S f(x + rho w) dw  drho,
// and the radial integral is split where the sphere of radius rho around x
// touches the boundary of the support ball of f.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nlpme/errors.hpp"
#include "nlpme/specfun.hpp"

namespace nlpme {

/// Ball containing the support of the integrand.
struct SupportBall {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 1.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  std::size_t max_refinements = 15;
  std::size_t azimuth_points = 8;  // trapezoid points in the azimuth (d = 3 only)
};

/// c_{d,alpha} = 2^alpha Gamma((d+alpha)/2) / (pi^{d/2} |Gamma(-alpha/2)|).
inline double frac_laplacian_kernel_constant(int d, double alpha) {
  return std::pow(2.0, alpha) * gamma_fn(0.5 * (d + alpha)) /
         (std::pow(std::numbers::pi, 0.5 * d) * std::abs(gamma_fn(-0.5 * alpha)));
}

/// C_beta = Gamma((d-beta)/2) / (2^beta pi^{d/2} Gamma(beta/2)).
inline double riesz_kernel_constant(int d, double beta) {
  return gamma_fn(0.5 * (d - beta)) / (std::pow(2.0, beta) * std::pow(std::numbers::pi, 0.5 * d) * gamma_fn(0.5 * beta));
}

namespace detail {

inline double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

// tanh-sinh on [a, b]; segments below roundoff length contribute nothing.
// The segment is mapped onto [0, 1/4] where Boost keeps both endpoints exactly
// representable (its generic [a, b] path can round abscissae onto an endpoint).
template <class G>
double integrate_segment(boost::math::quadrature::tanh_sinh<double>& rule, G&& g, double a, double b, double tol) {
  if (!(b - a > 1e-12 * std::max(std::abs(a), std::abs(b)))) return 0.0;
  const double scale = 4.0 * (b - a);
  double err = 0.0;
  return scale * rule.integrate([&](double s) { return g(a + scale * s); }, 0.0, 0.25, tol, &err);
}

// Spherical integrals of f around a fixed point, in a frame whose first axis
// points from the support center to x so the support boundary is crossed at a
// single polar angle.
template <class F>
class SphereSampler {
 public:
  SphereSampler(const F& f, std::span<const double> x, int d, const SupportBall& ball, const QuadratureOptions& opt)
      : f_(f), d_(d), ball_(ball), opt_(opt), inner_(opt.max_refinements) {
    for (int i = 0; i < d; ++i) x_[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double diff = x_[static_cast<std::size_t>(i)] - ball.center[static_cast<std::size_t>(i)];
      dist2 += diff * diff;
    }
    offset_ = std::sqrt(dist2);
    build_frame();
  }

  double offset() const { return offset_; }

  double at_center() const { return eval_at(0.0, {1.0, 0.0, 0.0}); }

  /// int_{S^{d-1}} f(x + rho w) dw; for d = 1 the sphere is {-1, +1}.
  double integral(double rho) const {
    if (d_ == 1) return eval_at(rho, {1.0, 0.0, 0.0}) + eval_at(rho, {-1.0, 0.0, 0.0});
    const double tol = 0.1 * opt_.rel_tol;
    // cosine of the polar angle at which x + rho w lies on the support sphere
    double t_cross = 2.0;
    if (offset_ > 0.0 && rho > 0.0) {
      t_cross = (ball_.radius * ball_.radius - offset_ * offset_ - rho * rho) / (2.0 * offset_ * rho);
    }
    const bool split = t_cross > -1.0 && t_cross < 1.0;
    if (d_ == 2) {
      auto g = [&](double theta) { return eval_at(rho, {std::cos(theta), std::sin(theta), 0.0}); };
      if (!split) return integrate(g, 0.0, 2.0 * std::numbers::pi, tol);
      const double th = std::acos(t_cross);
      return integrate(g, 0.0, th, tol) + integrate(g, th, 2.0 * std::numbers::pi - th, tol) +
             integrate(g, 2.0 * std::numbers::pi - th, 2.0 * std::numbers::pi, tol);
    }
    const std::size_t nphi = opt_.azimuth_points;
    auto g = [&](double t) {
      const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
      double acc = 0.0;
      for (std::size_t k = 0; k < nphi; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nphi);
        acc += eval_at(rho, {t, s * std::cos(phi), s * std::sin(phi)});
      }
      return acc * 2.0 * std::numbers::pi / static_cast<double>(nphi);
    };
    if (!split) return integrate(g, -1.0, 1.0, tol);
    return integrate(g, -1.0, t_cross, tol) + integrate(g, t_cross, 1.0, tol);
  }

 private:
  template <class G>
  double integrate(G&& g, double a, double b, double tol) const {
    return integrate_segment(inner_, g, a, b, tol);
  }

  // local frame coordinates -> point x + rho * (sum_i c_i e_i)
  double eval_at(double rho, const std::array<double, 3>& local) const {
    std::array<double, 3> p{};
    for (int i = 0; i < d_; ++i) {
      double dir = 0.0;
      for (int j = 0; j < d_; ++j) dir += local[static_cast<std::size_t>(j)] * frame_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i)] = x_[static_cast<std::size_t>(i)] + rho * dir;
    }
    return f_(std::span<const double>(p.data(), static_cast<std::size_t>(d_)));
  }

  void build_frame() {
    std::array<double, 3> e1{1.0, 0.0, 0.0};
    if (offset_ > 0.0) {
      for (int i = 0; i < d_; ++i) e1[static_cast<std::size_t>(i)] = (x_[static_cast<std::size_t>(i)] - ball_.center[static_cast<std::size_t>(i)]) / offset_;
    }
    frame_[0] = e1;
    if (d_ == 2) {
      frame_[1] = {-e1[1], e1[0], 0.0};
    } else if (d_ == 3) {
      // Gram-Schmidt against the coordinate axis least aligned with e1
      std::size_t pick = 0;
      for (std::size_t i = 1; i < 3; ++i) {
        if (std::abs(e1[i]) < std::abs(e1[pick])) pick = i;
      }
      std::array<double, 3> a{0.0, 0.0, 0.0};
      a[pick] = 1.0;
      const double proj = a[0] * e1[0] + a[1] * e1[1] + a[2] * e1[2];
      for (std::size_t i = 0; i < 3; ++i) a[i] -= proj * e1[i];
      const double norm = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
      for (double& v : a) v /= norm;
      frame_[1] = a;
      frame_[2] = {e1[1] * a[2] - e1[2] * a[1], e1[2] * a[0] - e1[0] * a[2], e1[0] * a[1] - e1[1] * a[0]};
    }
  }

  const F& f_;
  int d_;
  SupportBall ball_;
  QuadratureOptions opt_;
  std::array<double, 3> x_{};
  double offset_ = 0.0;
  std::array<std::array<double, 3>, 3> frame_{};
  mutable boost::math::quadrature::tanh_sinh<double> inner_;
};

// Radii at which the sphere around x meets the support boundary, plus the outer radius.
inline std::vector<double> radial_breakpoints(double offset, double radius) {
  std::vector<double> b;
  if (radius - offset > 0.0) b.push_back(radius - offset);
  if (offset - radius > 0.0) b.push_back(offset - radius);
  b.push_back(offset + radius);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

inline void check_quadrature_point(std::span<const double> x, int d) {
  if (d < 1 || d > 3) throw domain_error("quadrature: d must be 1, 2 or 3");
  if (x.size() != static_cast<std::size_t>(d)) throw domain_error("quadrature: point dimension does not match d");
}

}  // namespace detail

/// (-Delta)^{alpha/2} f (x) by direct quadrature of the singular integral.
///
/// f must vanish outside `support` and be C^2 near x. The part of the radial
/// integral below a small delta uses an even Taylor fit of the spherical mean,
/// the far field beyond the support is added analytically.
template <class F>
double frac_laplacian_quadrature(const F& f, std::span<const double> x, double alpha, int d, const SupportBall& support,
                                 const QuadratureOptions& opt = {}) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("frac_laplacian_quadrature: alpha must lie in (0, 2)");
  detail::check_quadrature_point(x, d);
  detail::SphereSampler<F> sphere(f, x, d, support, opt);
  boost::math::quadrature::tanh_sinh<double> outer(opt.max_refinements);

  const double area = detail::unit_sphere_area(d);
  const double fx = sphere.at_center();
  auto deficit = [&](double rho) { return area * fx - sphere.integral(rho); };
  const auto breaks = detail::radial_breakpoints(sphere.offset(), support.radius);
  const double rho_max = breaks.back();

  // near field: deficit(rho) ~ a rho^2 + b rho^4, fitted from rho = delta and delta/2
  const double delta = std::min(0.05 * breaks.front(), 1e-2 * rho_max);
  const double q1 = deficit(delta) / (delta * delta);
  const double q2 = deficit(0.5 * delta) / (0.25 * delta * delta);
  const double b = (q1 - q2) / (0.75 * delta * delta);
  const double a = q2 - b * 0.25 * delta * delta;
  double total = a * std::pow(delta, 2.0 - alpha) / (2.0 - alpha) + b * std::pow(delta, 4.0 - alpha) / (4.0 - alpha);

  auto integrand = [&](double rho) { return std::pow(rho, -1.0 - alpha) * deficit(rho); };
  double lo = delta;
  for (double hi : breaks) {
    if (hi <= lo) continue;
    total += detail::integrate_segment(outer, integrand, lo, hi, opt.rel_tol);
    lo = hi;
  }
  total += area * fx * std::pow(rho_max, -alpha) / alpha;
  const double value = frac_laplacian_kernel_constant(d, alpha) * total;
  if (!std::isfinite(value)) throw convergence_error("frac_laplacian_quadrature: non-finite result");
  return value;
}

/// I_beta f (x) with the positive kernel C_beta |z|^{beta-d}.
template <class F>
double riesz_quadrature(const F& f, std::span<const double> x, double beta, int d, const SupportBall& support,
                        const QuadratureOptions& opt = {}) {
  detail::check_quadrature_point(x, d);
  if (!(beta > 0.0 && beta < d)) throw domain_error("riesz_quadrature: beta must lie in (0, d)");
  detail::SphereSampler<F> sphere(f, x, d, support, opt);
  boost::math::quadrature::tanh_sinh<double> outer(opt.max_refinements);
  const auto breaks = detail::radial_breakpoints(sphere.offset(), support.radius);

  // first segment in s = rho^beta removes the rho^{beta-1} singularity
  const double first = breaks.front();
  double total = detail::integrate_segment(
      outer, [&](double s) { return sphere.integral(std::pow(s, 1.0 / beta)) / beta; }, 0.0, std::pow(first, beta),
      opt.rel_tol);
  double lo = first;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    total += detail::integrate_segment(
        outer, [&](double rho) { return std::pow(rho, beta - 1.0) * sphere.integral(rho); }, lo, breaks[i],
        opt.rel_tol);
    lo = breaks[i];
  }
  const double value = riesz_kernel_constant(d, beta) * total;
  if (!std::isfinite(value)) throw convergence_error("riesz_quadrature: non-finite result");
  return value;
}

}  // namespace nlpme
