#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nlpme/diagnostics.hpp"

using namespace nlpme;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> log_spaced(double a, double b, std::size_t count) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  return out;
}

Field gaussian(const Grid& g, double s) {
  return sample_field(g, [s](std::span<const double> x) { return std::exp(-x[0] * x[0] / (2.0 * s * s)); });
}

// Periodic energy (1/2L) sum_k |xi_k|^alpha |g^(xi_k)|^2 over resolved nonzero modes, with the
// continuous transform g^(xi) = s sqrt(2 pi) exp(-s^2 xi^2 / 2) of g = exp(-x^2 / (2 s^2)).
// For a Gaussian narrow against the box the grid coefficients are these samples (Poisson summation).
double gaussian_energy(const Grid& g, double s, double alpha) {
  double sum = 0.0;
  for (long k = 1; k < static_cast<long>(g.n / 2); ++k) {
    const double xi = k * pi / g.L;
    sum += 2.0 * std::pow(xi, alpha) * 2.0 * pi * s * s * std::exp(-s * s * xi * xi);
  }
  return sum / (2.0 * g.L);
}

}  // namespace

TEST(Errors, RelativeL1) {
  const Grid g{1, 4.0, 64};
  const Field a = gaussian(g, 1.0);
  EXPECT_EQ(relative_l1_error(a, a), 0.0);
  Field b = a;
  for (double& v : b.values) v *= 1.1;
  EXPECT_NEAR(relative_l1_error(b, a), 0.1, 1e-14);
  EXPECT_THROW(relative_l1_error(a, Field(g)), domain_error);
}

TEST(Errors, VelocityMatchesSimilarityFlow) {
  const BarenblattSpec spec{{1, 2.0, 1.0}, 1.0};
  const double coarse = velocity_error(spec, Grid{1, 8.0, 512}, 1.0);
  const double fine = velocity_error(spec, Grid{1, 8.0, 2048}, 1.0);
  EXPECT_LT(fine, 5e-2);
  EXPECT_LT(fine, coarse);
  EXPECT_THROW(velocity_error(spec, Grid{1, 8.0, 512}, 1.0, 1.0), domain_error);
}

TEST(Errors, VelocityInTwoDimensions) {
  const BarenblattSpec spec{{2, 2.0, 1.0}, 1.0};
  EXPECT_LT(velocity_error(spec, Grid{2, 4.0, 256}, 1.0), 5e-2);
}

TEST(Convergence, BenchmarkRefines) {
  const MediumParams p{1, 2.0, 1.0};
  const BarenblattSpec spec{p, radius_for_mass(p, 1.0)};
  const std::size_t ns[] = {512, 1024, 2048};
  const ConvergenceReport rep = solver_convergence(spec, 8.0, ns, 1.0, 2.0, 0.95);
  ASSERT_EQ(rep.error.size(), 3u);
  for (double r : rep.ratios()) EXPECT_GE(r, 1.5);
  for (double drift : rep.mass_drift) EXPECT_LE(drift, 1e-12);
}

TEST(Decay, ExponentsBalanceUnderScaling) {
  // u -> mu u and x -> s x must leave ||u||_p^a <= C ||grad^{alpha/2} |u|^{r/2}||^2 ||u||_1^b invariant
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_real_distribution<double> mexp(1.1, 3.0);
  std::uniform_real_distribution<double> order(0.1, 2.0);
  std::uniform_real_distribution<double> pexp(0.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const MediumParams mp{dim(rng), mexp(rng), order(rng)};
    const double p = std::max(mp.m - 1.0, 1.0) + 0.05 + pexp(rng);
    const DecayConstants dc = decay_constant(mp, p, 0.7);
    EXPECT_NEAR(dc.a, dc.r + dc.b, 1e-12);
    EXPECT_NEAR(mp.d * dc.a / p, mp.d - mp.alpha + mp.d * dc.b, 1e-12);
    EXPECT_NEAR(dc.exponent, theoretical_decay_slope(mp, p), 1e-14);
  }
}

TEST(Decay, ConstantSolvesTheNormOde) {
  // y = ||u||_p^p with y' <= -K M^{-b} y^{a/p} integrates to ||u||_p <= ((a/p - 1) K)^{-1/(a-p)} M^{b/(a-p)} t^{-1/(a-p)}
  for (const MediumParams mp : {MediumParams{1, 2.0, 1.0}, MediumParams{2, 3.0, 0.5}, MediumParams{1, 1.5, 1.8}}) {
    for (double p : {2.0, 3.0, 5.5}) {
      const double cn = 0.4;
      const DecayConstants dc = decay_constant(mp, p, cn);
      EXPECT_NEAR(dc.K, 4.0 * p * (p - 1.0) * (mp.m - 1.0) / (cn * dc.r * dc.r), 1e-14);
      const double want = std::pow((dc.a / p - 1.0) * dc.K, -1.0 / (dc.a - p));
      EXPECT_NEAR(dc.C / want, 1.0, 1e-13);
      EXPECT_NEAR(-1.0 / (dc.a - p), dc.exponent, 1e-14);
    }
  }
}

TEST(Decay, WorkedExample) {
  const DecayConstants dc = decay_constant({1, 2.0, 1.0}, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(dc.r, 3.0);
  EXPECT_DOUBLE_EQ(dc.a, 6.0);
  EXPECT_DOUBLE_EQ(dc.b, 3.0);
  EXPECT_DOUBLE_EQ(dc.exponent, -0.25);
  EXPECT_NEAR(dc.K, 8.0 / 9.0, 1e-15);
}

TEST(Decay, ArgumentChecks) {
  EXPECT_THROW(decay_constant({1, 2.0, 1.0}, 1.0, 1.0), domain_error);
  EXPECT_THROW(decay_constant({1, 4.0, 1.0}, 2.0, 1.0), domain_error);
  EXPECT_THROW(decay_constant({1, 2.0, 1.0}, 2.0, 0.0), domain_error);
  EXPECT_THROW(decay_constant({1, 2.0, 1.0}, INFINITY, 1.0), domain_error);
}

TEST(Decay, FitRecoversPowerLaw) {
  std::vector<DecayPoint> pts;
  for (double t : log_spaced(1.0, 32.0, 31)) pts.push_back({t, 3.0 * std::pow(t, -0.3)});
  const DecayReport rep = fit_decay(pts, {1, 2.0, 1.0}, 2.0, 2.0, 16.0, 1.0);
  EXPECT_NEAR(rep.fitted_slope, -0.3, 1e-12);
  EXPECT_DOUBLE_EQ(rep.theoretical_slope, -0.25);
  EXPECT_NEAR(rep.absolute_deviation(), 0.05, 1e-12);
  EXPECT_NEAR(rep.relative_deviation(), 0.2, 1e-12);
  for (const auto& pt : rep.points) {
    EXPECT_GE(pt.t, 2.0 - 1e-9);
    EXPECT_LE(pt.t, 16.0 + 1e-9);
  }
}

TEST(Decay, FitRejectsThinData) {
  std::vector<DecayPoint> pts;
  for (double t : log_spaced(1.0, 4.0, 30)) pts.push_back({t, 1.0 / t});
  EXPECT_THROW(fit_decay(pts, {1, 2.0, 1.0}, 2.0, 1.0, 4.0, 1.0), domain_error);  // span below 8
  pts.clear();
  for (double t : log_spaced(1.0, 16.0, 5)) pts.push_back({t, 1.0 / t});
  EXPECT_THROW(fit_decay(pts, {1, 2.0, 1.0}, 2.0, 1.0, 16.0, 1.0), domain_error);  // too few points
}

TEST(Decay, BoundRatioOnExactEnvelope) {
  const MediumParams mp{1, 2.0, 1.0};
  const double p = 2.0, mass = 0.7, cn = 0.5;
  const DecayConstants dc = decay_constant(mp, p, cn);
  const double sigma = dc.b / (dc.a - p);
  std::vector<DecayPoint> pts;
  for (double t : log_spaced(1.0, 16.0, 12)) pts.push_back({t, 0.5 * dc.C * std::pow(mass, sigma) * std::pow(t, dc.exponent)});
  const DecayReport rep = fit_decay(pts, mp, p, 1.0, 16.0, mass, cn);
  ASSERT_TRUE(rep.bound_ratio.has_value());
  EXPECT_NEAR(*rep.bound_ratio, 0.5, 1e-12);
  EXPECT_NEAR(*rep.c_theory, dc.C, 1e-15);
}

TEST(Decay, ExactSolutionHasTheoreticalSlopes) {
  const BarenblattSpec spec{{1, 2.0, 1.0}, 1.0};
  const Grid g{1, 16.0, 4096};
  const auto times = log_spaced(1.0, 16.0, 17);
  const Trajectory traj = exact_trajectory(spec, g, times);
  EXPECT_NEAR(fit_decay(traj, spec.params, 1.0, 1.0, 16.0).fitted_slope, 0.0, 1e-4);
  EXPECT_NEAR(fit_decay(traj, spec.params, 2.0, 1.0, 16.0).fitted_slope, -0.25, 1e-3);
  EXPECT_NEAR(fit_decay(traj, spec.params, 3.0, 1.0, 16.0).fitted_slope, -1.0 / 3.0, 1e-3);
  EXPECT_NEAR(fit_decay(traj, spec.params, INFINITY, 1.0, 16.0).fitted_slope, -0.5, 1e-3);
}

TEST(Inequalities, StroockVaropoulosIsParsevalAtQEqualsTwo) {
  for (const Field& w : audit_fields({1, 256, 8.0, 5, 1})) {
    SpectralWorkspace ws(w.grid);
    const double energy = detail::fractional_energy(w, 1.0, ws);
    EXPECT_NEAR(check_stroock_varopoulos(w, 1.0, 2.0) / energy, 0.0, 1e-12);
  }
}

TEST(Inequalities, StroockVaropoulosIsEqualityForClassicalLaplacian) {
  // for alpha = 2 both sides equal (q-1) int |w|^{q-2} |grad w|^2
  for (const Field& w : audit_fields({1, 512, 8.0, 5, 2})) {
    for (double q : {1.5, 3.0}) {
      SpectralWorkspace ws(w.grid);
      const double rhs = 4.0 * (q - 1.0) / (q * q) * detail::fractional_energy(detail::abs_power(w, 0.5 * q), 2.0, ws);
      EXPECT_NEAR(check_stroock_varopoulos(w, 2.0, q) / rhs, 0.0, 1e-6) << q;
    }
  }
}

TEST(Inequalities, NashRatioOfGaussian) {
  const Grid g{1, 16.0, 512};
  const Field v = gaussian(g, 1.0);
  for (double alpha : {0.5, 1.0, 1.5}) {
    const double l2sq = std::sqrt(pi);
    const double l1 = std::sqrt(2.0 * pi);
    const double want = std::pow(l2sq, 1.0 + alpha) / (gaussian_energy(g, 1.0, alpha) * std::pow(l1, 2.0 * alpha));
    EXPECT_NEAR(check_nash(v, alpha) / want, 1.0, 1e-10) << alpha;
  }
  EXPECT_THROW(check_nash(Field(g), 1.0), domain_error);
}

TEST(Inequalities, GagliardoNirenbergMarginOfGaussian) {
  const Grid g{1, 16.0, 512};
  const Field u = gaussian(g, 1.0);
  const MediumParams mp{1, 2.0, 1.0};
  for (double p : {1.5, 2.0, 3.0}) {
    const double cn = 0.6;
    const DecayConstants dc = decay_constant(mp, p, cn);
    const double energy = gaussian_energy(g, std::sqrt(2.0 / dc.r), mp.alpha);
    const double lp = std::pow(std::sqrt(2.0 * pi / p), 1.0 / p);
    const double want = cn * energy * std::pow(std::sqrt(2.0 * pi), dc.b) - std::pow(lp, dc.a);
    EXPECT_NEAR(check_gn(u, p, mp, cn), want, 1e-10 * std::abs(want)) << p;
  }
  Field neg = u;
  neg[3] = -1.0;
  EXPECT_THROW(check_gn(neg, 2.0, mp, 0.6), domain_error);
}

TEST(Inequalities, AuditFieldsAreReproducibleAndBandLimited) {
  const AuditOptions opt{1, 128, 8.0, 4, 17};
  const auto a = audit_fields(opt);
  const auto b = audit_fields(opt);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values, b[i].values);
  for (const Field& w : a) {
    std::vector<std::complex<double>> spec(w.values.begin(), w.values.end());
    Fft(w.size()).forward(spec);
    double peak = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const long kk = w.grid.wavenumber(k);
      peak = std::max(peak, std::abs(spec[k]));
      if (std::abs(kk) > static_cast<long>(opt.n / 4)) tail = std::max(tail, std::abs(spec[k]));
      EXPECT_GE(w[k], 0.0);
    }
    EXPECT_LT(tail, 1e-12 * peak);
  }
  EXPECT_NE(audit_fields({1, 128, 8.0, 1, 18})[0].values, a[0].values);
}

TEST(Inequalities, SmallSuitesPass) {
  const AuditOptions opt{1, 256, 8.0, 10, 3};
  for (double alpha : {0.5, 1.5}) {
    const auto sv = stroock_varopoulos_suite(alpha, 3.0, opt);
    EXPECT_TRUE(sv.passed()) << sv.worst_margin;
    EXPECT_EQ(sv.margins.size(), 10u);
    const auto nash = nash_suite(alpha, opt);
    EXPECT_TRUE(nash.passed());
    EXPECT_GT(*nash.empirical_constant, 0.0);
    const auto gn = gagliardo_nirenberg_suite(alpha, 2.0, 2.0, opt);
    EXPECT_TRUE(gn.passed()) << gn.worst_margin;
    EXPECT_DOUBLE_EQ((*gn.abr)[2], 3.0);
  }
}

TEST(ClosedForms, GetoorAndLemmaAgreeWithQuadrature) {
  const double radii[] = {0.0, 0.3, 0.6, 0.9};
  EXPECT_LT(verify_getoor(1, 1.0, radii), 1e-6);
  EXPECT_LT(verify_getoor(2, 0.7, radii), 1e-6);
  const double lemma_radii[] = {0.0, 0.5, 1.5, 3.0};
  EXPECT_LT(verify_lemma(1.0, 1.0, 3, lemma_radii), 1e-6);
  const double bad[] = {1.0};
  EXPECT_THROW(verify_lemma(1.0, 1.0, 3, bad), domain_error);
  EXPECT_THROW(getoor_value(1, 1.0, 1.0), domain_error);
}

TEST(ClosedForms, OperatorIdentity) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    EXPECT_LT(operator_identity_residual(Grid{1, 8.0, 256}, alpha), 1e-12);
    EXPECT_LT(operator_identity_residual(Grid{2, 8.0, 64}, alpha), 1e-12);
  }
}

TEST(WeakForm, SmoothStep) {
  EXPECT_EQ(smooth_step(-0.5), 0.0);
  EXPECT_EQ(smooth_step(1.5), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
  for (double s : {0.1, 0.3, 0.5, 0.8, 0.95}) {
    EXPECT_NEAR(smooth_step(s) + smooth_step(1.0 - s), 1.0, 1e-15);
    const double h = 1e-6;
    EXPECT_NEAR(smooth_step_derivative(s), (smooth_step(s + h) - smooth_step(s - h)) / (2.0 * h), 1e-7);
  }
}

TEST(WeakForm, TestFunctionDerivatives) {
  TestFunction tf;
  tf.center = {0.2, -0.1};
  tf.inner = 0.5;
  tf.outer = 1.5;
  tf.t_on = 1.0;
  tf.t_off = 2.0;
  EXPECT_EQ(tf.theta(0.5), 1.0);
  EXPECT_EQ(tf.theta(2.5), 0.0);
  const double h = 1e-6;
  EXPECT_NEAR(tf.theta_dot(1.3), (tf.theta(1.3 + h) - tf.theta(1.3 - h)) / (2.0 * h), 1e-7);
  const std::array<double, 2> x{0.9, 0.6};
  const auto g = tf.grad_psi(x, 2);
  EXPECT_NEAR(g[0], (tf.psi({x[0] + h, x[1]}, 2) - tf.psi({x[0] - h, x[1]}, 2)) / (2.0 * h), 1e-7);
  EXPECT_NEAR(g[1], (tf.psi({x[0], x[1] + h}, 2) - tf.psi({x[0], x[1] - h}, 2)) / (2.0 * h), 1e-7);
  EXPECT_EQ(tf.psi({0.3, 0.0}, 2), 1.0);
}

TEST(WeakForm, StationaryDataBalanceInitialAndTimeTerms) {
  // frozen snapshots: int u phi_t = -u . psi theta(t0) exactly
  const Grid g{1, 8.0, 256};
  const Field u = gaussian(g, 0.4);
  Trajectory traj;
  for (double t : {1.0, 1.3, 1.45, 2.0}) traj.snapshots.push_back({t, u});
  const TestFunction tf = default_test_function(g, 1.0, 2.0);
  const auto terms = weak_residual_terms(traj, {1, 2.0, 1.0}, tf);
  EXPECT_NEAR(terms.initial + terms.time, 0.0, 1e-14);
  EXPECT_GT(terms.initial, 0.0);
}

TEST(WeakForm, ExactSolutionResidualShrinksOnWideBox) {
  const BarenblattSpec spec{{1, 2.0, 1.0}, 1.0};
  std::vector<double> times;
  for (int i = 0; i <= 200; ++i) times.push_back(1.0 + i / 200.0);
  std::vector<double> residuals;
  for (std::size_t n : {2048u, 8192u}) {
    const Grid g{1, 32.0, n};
    const Trajectory traj = exact_trajectory(spec, g, times);
    residuals.push_back(std::abs(weak_residual(traj, spec.params, default_test_function(g, 1.0, 2.0))));
  }
  EXPECT_LT(residuals[1], residuals[0]);
  EXPECT_LT(residuals[1], 1e-3);
}

TEST(WeakForm, ArgumentChecks) {
  const Grid g{1, 8.0, 64};
  Trajectory traj;
  traj.snapshots.push_back({1.0, Field(g)});
  EXPECT_THROW(weak_residual(traj, {1, 2.0, 1.0}, default_test_function(g, 1.0, 2.0)), domain_error);
  traj.snapshots.push_back({2.0, Field(g)});
  TestFunction late = default_test_function(g, 1.0, 2.0);
  late.t_off = 2.0;
  EXPECT_THROW(weak_residual(traj, {1, 2.0, 1.0}, late), domain_error);
  TestFunction wide = default_test_function(g, 1.0, 2.0);
  wide.outer = 9.0;
  EXPECT_THROW(weak_residual(traj, {1, 2.0, 1.0}, wide), domain_error);
}

TEST(Holder, FitReproducesExponent) {
  for (auto [m, alpha] : {std::pair{2.0, 1.0}, std::pair{2.0, 2.0}, std::pair{3.0, 1.0}, std::pair{2.5, 0.7}}) {
    const MediumParams p{1, m, alpha};
    EXPECT_NEAR(holder_fit({p, 1.0}) / holder_exponent(p), 1.0, 1e-2) << m << " " << alpha;
  }
  EXPECT_THROW(holder_fit({{1, 1.5, 1.5}, 1.0}), domain_error);
}
