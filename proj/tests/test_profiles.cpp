#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "nlpme/profiles.hpp"
#include "nlpme/quadrature.hpp"

using namespace nlpme;

namespace {

// radial integral of |Phi|^p over R^d, by tanh-sinh on [0, R]
double radial_lp_integral(const BarenblattSpec& spec, double p) {
  boost::math::quadrature::tanh_sinh<double> rule;
  const int d = spec.params.d;
  auto f = [&](double r) {
    std::vector<double> y(static_cast<std::size_t>(d), 0.0);
    y[0] = r;
    const double v = std::pow(phi_value(spec, y), p);
    return d == 1 ? 2.0 * v : 2.0 * std::numbers::pi * r * v;
  };
  return rule.integrate(f, 0.0, spec.R);
}

}  // namespace

TEST(Profile, PeakValueFromDefinition) {
  const BarenblattSpec spec{{1, 2.0, 1.0}, 1.0};
  const double y0[] = {0.0};
  EXPECT_NEAR(phi_value(spec, y0), 0.5, 1e-15);  // k = 1/2, m - 1 = 1
  const double y1[] = {0.6};
  EXPECT_NEAR(phi_value(spec, y1), 0.5 * 0.8, 1e-15);
}

TEST(Profile, VanishesOnAndOutsideSphere) {
  const BarenblattSpec spec{{2, 3.0, 1.3}, 1.7};
  const double on[] = {1.7, 0.0};
  const double out[] = {1.5, 1.5};
  EXPECT_EQ(phi_value(spec, on), 0.0);
  EXPECT_EQ(phi_value(spec, out), 0.0);
}

TEST(Profile, RejectsWrongPointDimension) {
  const BarenblattSpec spec{{2, 2.0, 1.0}, 1.0};
  const double y[] = {0.1};
  EXPECT_THROW(phi_value(spec, y), domain_error);
}

TEST(Profile, LpNormsMatchRadialQuadrature) {
  for (int d : {1, 2}) {
    for (auto [m, alpha] : {std::array{2.0, 1.0}, std::array{3.0, 1.5}, std::array{1.5, 0.6}, std::array{2.0, 2.0}}) {
      const BarenblattSpec spec{{d, m, alpha}, 1.3};
      for (double p : {1.0, 2.0, 3.5}) {
        const double want = std::pow(radial_lp_integral(spec, p), 1.0 / p);
        EXPECT_NEAR(profile_lp_norm(spec, p) / want, 1.0, 1e-10) << d << " " << m << " " << alpha << " " << p;
      }
      const double y0[] = {0.0, 0.0};
      EXPECT_NEAR(profile_lp_norm(spec, INFINITY), phi_value(spec, std::span<const double>(y0, d)), 1e-14);
    }
  }
}

TEST(Profile, ClassicalMassInOneDimension) {
  // alpha = 2, m = 2: Phi = (1 - y^2)_+ / 6, mass 2/9
  const BarenblattSpec spec{{1, 2.0, 2.0}, 1.0};
  EXPECT_NEAR(profile_mass(spec), 2.0 / 9.0, 1e-14);
}

TEST(Profile, RadiusForMassRoundTrip) {
  for (const MediumParams p : {MediumParams{1, 2.0, 1.0}, MediumParams{2, 3.0, 0.7}, MediumParams{1, 1.4, 1.9}}) {
    for (double mass : {0.1, 1.0, 25.0}) {
      const double R = radius_for_mass(p, mass);
      EXPECT_NEAR(profile_mass(BarenblattSpec{p, R}) / mass, 1.0, 1e-13);
    }
  }
  EXPECT_THROW(radius_for_mass({1, 2.0, 1.0}, 0.0), domain_error);
}

TEST(SelfSimilar, MassIsConservedInTime) {
  const BarenblattSpec spec{{1, 2.0, 1.2}, 1.0};
  boost::math::quadrature::tanh_sinh<double> rule;
  const double m0 = profile_mass(spec);
  for (double t : {0.5, 1.0, 3.0, 17.0}) {
    const double front = interface_radius(spec, t);
    const double mass = rule.integrate(
        [&](double x) {
          const double xs[] = {x};
          return selfsim_value(spec, t, xs);
        },
        -front, front);
    EXPECT_NEAR(mass / m0, 1.0, 1e-10) << t;
  }
}

TEST(SelfSimilar, ScalingOfPeakAndFront) {
  const BarenblattSpec spec{{2, 2.5, 0.8}, 0.9};
  const double lambda = lambda_exponent(spec.params);
  const double origin[] = {0.0, 0.0};
  const double peak1 = selfsim_value(spec, 1.0, origin);
  for (double t : {2.0, 8.0}) {
    EXPECT_NEAR(selfsim_value(spec, t, origin), peak1 * std::pow(t, -2.0 * lambda), 1e-14);
    EXPECT_NEAR(interface_radius(spec, t), 0.9 * std::pow(t, lambda), 1e-14);
  }
  EXPECT_THROW(selfsim_value(spec, 0.0, origin), domain_error);
}

TEST(Velocity, ExactInsideSupport) {
  const BarenblattSpec spec{{2, 2.0, 1.0}, 1.0};
  const double x[] = {0.3, -0.2};
  const auto w = exact_velocity(spec, 2.0, x);
  const double lambda = lambda_exponent(spec.params);
  EXPECT_NEAR(w[0], -lambda * 0.3 / 2.0, 1e-15);
  EXPECT_NEAR(w[1], lambda * 0.2 / 2.0, 1e-15);
  const double edge[] = {interface_radius(spec, 2.0), 0.0};
  EXPECT_THROW(exact_velocity(spec, 2.0, edge), domain_error);
}

TEST(Velocity, PressureGradientByQuadrature) {
  // grad^{alpha-1} = grad I_{2-alpha}; differentiate the Riesz potential of Phi^{m-1} numerically
  struct Case {
    int d;
    double m, alpha;
  };
  for (const Case c : {Case{1, 2.0, 1.5}, Case{1, 3.0, 1.2}, Case{2, 2.0, 1.0}, Case{2, 2.5, 0.6}}) {
    const BarenblattSpec spec{{c.d, c.m, c.alpha}, 1.0};
    auto pressure = [&](std::span<const double> y) { return std::pow(phi_value(spec, y), c.m - 1.0); };
    const SupportBall ball{{0.0, 0.0, 0.0}, 1.0};
    const QuadratureOptions opt{1e-11, 15, 8};
    const double lambda = lambda_exponent(spec.params);
    for (double r : {0.2, 0.5, 0.7}) {
      const double hstep = 1e-3;
      std::vector<double> plus(static_cast<std::size_t>(c.d), 0.0), minus = plus;
      plus[0] = r + hstep;
      minus[0] = r - hstep;
      const double grad = (riesz_quadrature(pressure, plus, 2.0 - c.alpha, c.d, ball, opt) -
                           riesz_quadrature(pressure, minus, 2.0 - c.alpha, c.d, ball, opt)) /
                          (2.0 * hstep);
      EXPECT_NEAR(grad, -lambda * r, 1e-5) << c.d << " " << c.m << " " << c.alpha << " r=" << r;
    }
  }
}

TEST(Holder, ExponentExamples) {
  EXPECT_DOUBLE_EQ(holder_exponent({1, 2.0, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(holder_exponent({1, 1.5, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(holder_exponent({1, 3.0, 1.0}), 0.25);
  EXPECT_DOUBLE_EQ(holder_exponent({1, 1.2, 1.8}), 1.0);
}
