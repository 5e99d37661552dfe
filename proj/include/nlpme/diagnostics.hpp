#pragma once

// Verification suites: decay fits, functional-inequality audits, Getoor and
// Riesz-profile checks, the weak-form residual and the interface regularity fit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlpme/errors.hpp"
#include "nlpme/fracops.hpp"
#include "nlpme/grid.hpp"
#include "nlpme/norms.hpp"
#include "nlpme/profiles.hpp"
#include "nlpme/quadrature.hpp"
#include "nlpme/solver.hpp"
#include "nlpme/specfun.hpp"

namespace nlpme {

// ---------------------------------------------------------------------------
// exact solutions on grids

inline Field exact_field(const BarenblattSpec& spec, const Grid& grid, double t) {
  spec.validate();
  if (spec.params.d != grid.d) throw domain_error("exact_field: dimension mismatch");
  return sample_field(grid, [&](std::span<const double> x) { return selfsim_value(spec, t, x); });
}

/// sum |u - v| / sum |v|.
inline double relative_l1_error(const Field& u, const Field& reference) {
  if (!(u.grid == reference.grid)) throw domain_error("relative_l1_error: grids differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += std::abs(u[i] - reference[i]);
    den += std::abs(reference[i]);
  }
  if (den == 0.0) throw domain_error("relative_l1_error: reference is zero");
  return num / den;
}

/// Barenblatt initial data at t0 on the grid, with the companion spec.
inline CauchyConfig barenblatt_config(const BarenblattSpec& spec, const Grid& grid, double t0, double t_end, double cfl) {
  CauchyConfig cfg;
  cfg.params = spec.params;
  cfg.grid = grid;
  cfg.u0 = exact_field(spec, grid, t0);
  cfg.t0 = t0;
  cfg.t_end = t_end;
  cfg.cfl = cfl;
  return cfg;
}

/// max over |x| < fraction * R t^lambda of |w_h(x) + lambda x / t|, divided by lambda R / t.
inline double velocity_error(const BarenblattSpec& spec, const Grid& grid, double t, double fraction = 0.8) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw domain_error("velocity_error: fraction must lie in (0, 1)");
  const Field u = exact_field(spec, grid, t);
  const VectorField w = compute_velocity(u, spec.params);
  const double front = interface_radius(spec, t);
  const double lambda = lambda_exponent(spec.params);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    if (std::hypot(p[0], p[1]) >= fraction * front) continue;
    const auto exact = exact_velocity(spec, t, std::span<const double>(p.data(), static_cast<std::size_t>(grid.d)));
    for (int j = 0; j < grid.d; ++j) {
      worst = std::max(worst, std::abs(w.components[static_cast<std::size_t>(j)][i] - exact[static_cast<std::size_t>(j)]));
    }
  }
  return worst / (lambda * spec.R / t);
}

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceReport {
  std::vector<std::size_t> n;
  std::vector<double> error;  // relative L1 error at t_end
  std::vector<double> mass_drift;

  /// error[i] / error[i+1]
  std::vector<double> ratios() const {
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < error.size(); ++i) r.push_back(error[i] / error[i + 1]);
    return r;
  }
};

/// Solver error against the exact solution at t_end for each resolution in ns.
inline ConvergenceReport solver_convergence(const BarenblattSpec& spec, double L, std::span<const std::size_t> ns, double t0,
                                            double t_end, double cfl) {
  ConvergenceReport rep;
  for (std::size_t n : ns) {
    const Grid grid{spec.params.d, L, n};
    CauchyConfig cfg = barenblatt_config(spec, grid, t0, t_end, cfl);
    cfg.snapshot_times = {t_end};
    const Trajectory traj = run(cfg);
    rep.n.push_back(n);
    rep.error.push_back(relative_l1_error(traj.snapshots.back().u, exact_field(spec, grid, t_end)));
    const double m0 = traj.series.front().mass;
    double drift = 0.0;
    for (const auto& row : traj.series) drift = std::max(drift, std::abs(row.mass - m0) / std::abs(m0));
    rep.mass_drift.push_back(drift);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// decay

struct DecayPoint {
  double t = 0.0;
  double value = 0.0;
};

struct DecayConstants {
  double r = 0.0;
  double a = 0.0;
  double b = 0.0;
  double K = 0.0;
  double C = 0.0;
  double exponent = 0.0;  // -d lambda (1 - 1/p)
};

/// Exponents and constant of the L^p decay estimate for the given Nash constant.
inline DecayConstants decay_constant(const MediumParams& mp, double p, double c_nash) {
  mp.validate();
  if (!(p > 1.0) || std::isinf(p)) throw domain_error("decay_constant: p must be finite and > 1");
  if (!(p >= mp.m - 1.0)) throw domain_error("decay_constant: p must be >= m - 1");
  if (!(c_nash > 0.0)) throw domain_error("decay_constant: C_N must be > 0");
  const double d = mp.d;
  const double m = mp.m;
  const double alpha = mp.alpha;
  DecayConstants out;
  out.r = p + m - 1.0;
  out.a = p / (p - 1.0) * (d * (out.r - 1.0) + alpha) / d;
  out.b = (p * alpha + d * (m - 1.0)) / (d * (p - 1.0));
  out.K = 4.0 * p * (p - 1.0) * (m - 1.0) / (c_nash * out.r * out.r);
  out.exponent = -d / (d * (m - 1.0) + alpha) * (1.0 - 1.0 / p);
  const double bracket = 4.0 * (m - 1.0) * (d * (m - 1.0) + alpha) / (c_nash * d) * p / (out.r * out.r);
  out.C = std::pow(bracket, out.exponent);
  return out;
}

/// -d lambda (1 - 1/p), with 1/inf = 0.
inline double theoretical_decay_slope(const MediumParams& mp, double p) {
  const double inv = std::isinf(p) ? 0.0 : 1.0 / p;
  return -mp.d * lambda_exponent(mp) * (1.0 - inv);
}

struct DecayReport {
  double p = 2.0;
  double fitted_slope = 0.0;
  double theoretical_slope = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double mass = 0.0;
  std::optional<double> c_nash;
  std::optional<double> c_theory;
  // max over points of ||u(t)||_p / (C M^sigma t^slope), sigma = 1 - (m-1)(-slope_theory)
  std::optional<double> bound_ratio;
  std::vector<DecayPoint> points;

  double absolute_deviation() const { return std::abs(fitted_slope - theoretical_slope); }
  double relative_deviation() const {
    return theoretical_slope == 0.0 ? absolute_deviation() : absolute_deviation() / std::abs(theoretical_slope);
  }
};

/// Least-squares slope of log value vs log t over points inside [t_min, t_max].
inline DecayReport fit_decay(std::span<const DecayPoint> points, const MediumParams& mp, double p, double t_min, double t_max,
                             double mass, std::optional<double> c_nash = std::nullopt) {
  mp.validate();
  if (!(p >= 1.0)) throw domain_error("fit_decay: p must be >= 1");
  if (!(t_min > 0.0 && t_max > t_min)) throw domain_error("fit_decay: invalid window");
  DecayReport rep;
  rep.p = p;
  rep.t_min = t_min;
  rep.t_max = t_max;
  rep.mass = mass;
  rep.theoretical_slope = theoretical_decay_slope(mp, p);
  const double slack = 1e-9 * t_max;
  for (const auto& pt : points) {
    if (pt.t >= t_min - slack && pt.t <= t_max + slack) {
      if (!(pt.value > 0.0)) throw domain_error("fit_decay: nonpositive norm in window");
      rep.points.push_back(pt);
    }
  }
  if (rep.points.size() < 10) throw domain_error("fit_decay: fewer than 10 points in window");
  const double lo = rep.points.front().t;
  const double hi = rep.points.back().t;
  if (hi < 8.0 * lo * (1.0 - 1e-9)) throw domain_error("fit_decay: points span less than a factor 8 in t");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& pt : rep.points) {
    const double x = std::log(pt.t);
    const double y = std::log(pt.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(rep.points.size());
  rep.fitted_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);

  if (c_nash && p > 1.0 && !std::isinf(p) && p >= mp.m - 1.0) {
    const DecayConstants dc = decay_constant(mp, p, *c_nash);
    rep.c_nash = c_nash;
    rep.c_theory = dc.C;
    const double sigma = 1.0 - (mp.m - 1.0) * (-rep.theoretical_slope);
    double worst = 0.0;
    for (const auto& pt : rep.points) {
      worst = std::max(worst, pt.value / (dc.C * std::pow(mass, sigma) * std::pow(pt.t, rep.theoretical_slope)));
    }
    rep.bound_ratio = worst;
  }
  return rep;
}

/// Decay fit on a trajectory: series rows for p in {1, 2, inf}, snapshots otherwise.
inline DecayReport fit_decay(const Trajectory& traj, const MediumParams& mp, double p, double t_min, double t_max,
                             std::optional<double> c_nash = std::nullopt) {
  if (traj.series.empty()) throw domain_error("fit_decay: empty trajectory");
  std::vector<DecayPoint> pts;
  if (p == 1.0 || p == 2.0 || std::isinf(p)) {
    for (const auto& row : traj.series) {
      pts.push_back({row.t, p == 1.0 ? row.l1 : (p == 2.0 ? row.l2 : row.linf)});
    }
  } else {
    for (const auto& snap : traj.snapshots) pts.push_back({snap.t, lp_norm(snap.u, p)});
  }
  return fit_decay(pts, mp, p, t_min, t_max, traj.series.front().l1, c_nash);
}

// ---------------------------------------------------------------------------
// functional inequalities

namespace detail {

// sum_j || grad^{alpha/2}_j g ||_2^2
inline double fractional_energy(const Field& g, double alpha, SpectralWorkspace& ws) {
  const VectorField grad = frac_gradient_spectral(g, 0.5 * alpha, ws);
  double s = 0.0;
  for (const auto& comp : grad.components) {
    for (double v : comp) s += v * v;
  }
  return s * g.grid.cell_volume();
}

inline Field abs_power(const Field& f, double e) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::pow(std::abs(f[i]), e);
  return out;
}

inline void check_audit_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw domain_error("alpha must lie in (0, 2]");
}

}  // namespace detail

/// int |w|^{q-2} w (-Delta)^{alpha/2} w  -  4(q-1)/q^2 ||grad^{alpha/2} |w|^{q/2}||^2.
inline double check_stroock_varopoulos(const Field& w, double alpha, double q) {
  detail::check_audit_alpha(alpha);
  if (!(q > 1.0)) throw domain_error("check_stroock_varopoulos: q must be > 1");
  SpectralWorkspace ws(w.grid);
  const Field lap = frac_laplacian_spectral(w, alpha, ws);
  double lhs = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w[i];
    const double weight = v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v), q - 1.0), v);
    lhs += weight * lap[i];
  }
  lhs *= w.grid.cell_volume();
  const double rhs = 4.0 * (q - 1.0) / (q * q) * detail::fractional_energy(detail::abs_power(w, 0.5 * q), alpha, ws);
  return lhs - rhs;
}

/// ||v||_2^{2(1+alpha/d)} / (||grad^{alpha/2} v||_2^2 ||v||_1^{2 alpha/d}).
inline double check_nash(const Field& v, double alpha) {
  detail::check_audit_alpha(alpha);
  const double l1 = lp_norm(v, 1.0);
  if (l1 == 0.0) throw domain_error("check_nash: zero field");
  SpectralWorkspace ws(v.grid);
  const double energy = detail::fractional_energy(v, alpha, ws);
  if (!(energy > 0.0)) throw domain_error("check_nash: field has no resolved nonconstant modes");
  const double d = v.grid.d;
  return std::pow(lp_norm(v, 2.0), 2.0 * (1.0 + alpha / d)) / (energy * std::pow(l1, 2.0 * alpha / d));
}

/// C_N ||grad^{alpha/2} |u|^{r/2}||^2 ||u||_1^b - ||u||_p^a, r = p + m - 1.
inline double check_gn(const Field& u, double p, const MediumParams& mp, double c_nash) {
  if (mp.d != u.grid.d) throw domain_error("check_gn: dimension mismatch");
  const DecayConstants dc = decay_constant(mp, p, c_nash);
  for (double v : u.values) {
    if (v < 0.0) throw domain_error("check_gn: u must be nonnegative");
  }
  const double l1 = lp_norm(u, 1.0);
  if (l1 == 0.0) throw domain_error("check_gn: zero field");
  SpectralWorkspace ws(u.grid);
  const double energy = detail::fractional_energy(detail::abs_power(u, 0.5 * dc.r), mp.alpha, ws);
  return c_nash * energy * std::pow(l1, dc.b) - std::pow(lp_norm(u, p), dc.a);
}

struct AuditOptions {
  int d = 1;
  std::size_t n = 512;
  double L = 8.0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
};

/// Smooth nonnegative fields w = g^2 with g a Gaussian mixture low-passed to |k| <= n/8,
/// so w carries only the lowest n/4 wavenumbers.
inline std::vector<Field> audit_fields(const AuditOptions& opt) {
  const Grid grid{opt.d, opt.L, opt.n};
  grid.validate();
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> weight(0.2, 1.0);
  std::uniform_real_distribution<double> width(0.3, 0.8);
  std::uniform_real_distribution<double> centre(-1.5, 1.5);
  const long cutoff = static_cast<long>(opt.n / 8);
  SpectralWorkspace ws(grid);

  std::vector<Field> out;
  out.reserve(opt.trials);
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    struct Bump {
      double w, s;
      std::array<double, 2> c;
    };
    std::vector<Bump> bumps(static_cast<std::size_t>(count(rng)));
    for (auto& b : bumps) {
      b.w = weight(rng);
      b.s = width(rng);
      b.c = {centre(rng), opt.d == 2 ? centre(rng) : 0.0};
    }
    const Field g = sample_field(grid, [&](std::span<const double> x) {
      double acc = 0.0;
      for (const auto& b : bumps) {
        double r2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) r2 += (x[j] - b.c[j]) * (x[j] - b.c[j]);
        acc += b.w * std::exp(-0.5 * r2 / (b.s * b.s));
      }
      return acc;
    });
    std::vector<std::complex<double>> spec(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) spec[i] = g[i];
    ws.transform(spec, false);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t a = opt.d == 1 ? i : i / opt.n;
      const std::size_t b = opt.d == 1 ? 0 : i % opt.n;
      if (std::abs(grid.wavenumber(a)) > cutoff || std::abs(grid.wavenumber(b)) > cutoff) spec[i] = 0.0;
    }
    ws.transform(spec, true);
    Field w(grid);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = spec[i].real() * spec[i].real();
    out.push_back(std::move(w));
  }
  return out;
}

struct InequalityReport {
  InequalityReport() = default;
  InequalityReport(std::string n, double a, double e, std::size_t t) : name(std::move(n)), alpha(a), exponent(e), trials(t) {}

  std::string name;  // stroock_varopoulos | nash | gagliardo_nirenberg
  double alpha = 1.0;
  double exponent = 2.0;  // q for SV, p for GN, unused for Nash
  std::size_t trials = 0;
  double worst_margin = 0.0;  // min over trials of margin / RHS
  std::optional<std::array<double, 3>> abr;  // (a, b, r)
  std::optional<double> empirical_constant;  // Nash: sup of the ratio over the suite
  std::vector<double> margins;

  bool passed(double tol = 1e-10) const { return worst_margin >= -tol; }
};

inline InequalityReport stroock_varopoulos_suite(double alpha, double q, const AuditOptions& opt) {
  InequalityReport rep("stroock_varopoulos", alpha, q, opt.trials);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double c = 4.0 * (q - 1.0) / (q * q);
  for (const Field& w : audit_fields(opt)) {
    SpectralWorkspace ws(w.grid);
    const double rhs = c * detail::fractional_energy(detail::abs_power(w, 0.5 * q), alpha, ws);
    const double margin = check_stroock_varopoulos(w, alpha, q) / rhs;
    rep.margins.push_back(margin);
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  return rep;
}

/// Nash ratios over the audit fields plus any extra fields; worst_margin is (C - ratio)/C with C the sup.
inline InequalityReport nash_suite(double alpha, const AuditOptions& opt, std::span<const Field> extra = {}) {
  InequalityReport rep("nash", alpha, 0.0, 0);
  std::vector<double> ratios;
  for (const Field& v : audit_fields(opt)) ratios.push_back(check_nash(v, alpha));
  for (const Field& v : extra) ratios.push_back(check_nash(v, alpha));
  rep.trials = ratios.size();
  const double sup = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  rep.empirical_constant = sup;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double r : ratios) {
    rep.margins.push_back((sup - r) / sup);
    rep.worst_margin = std::min(rep.worst_margin, rep.margins.back());
  }
  return rep;
}

/// GN audit with C_N taken as the sup of the Nash ratio over the audit fields and the
/// fields |u|^{r/2} that the interpolation chain feeds into Nash.
inline InequalityReport gagliardo_nirenberg_suite(double alpha, double p, double m, const AuditOptions& opt) {
  const MediumParams mp{opt.d, m, alpha};
  const auto fields = audit_fields(opt);
  const double r = p + m - 1.0;
  std::vector<Field> powered;
  for (const Field& u : fields) powered.push_back(detail::abs_power(u, 0.5 * r));
  const double c_nash = *nash_suite(alpha, opt, powered).empirical_constant;
  const DecayConstants dc = decay_constant(mp, p, c_nash);

  InequalityReport rep("gagliardo_nirenberg", alpha, p, opt.trials);
  rep.abr = std::array<double, 3>{dc.a, dc.b, dc.r};
  rep.empirical_constant = c_nash;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const Field& u : fields) {
    const double lhs = std::pow(lp_norm(u, p), dc.a);
    const double margin = check_gn(u, p, mp, c_nash);
    const double rhs = margin + lhs;
    rep.margins.push_back(margin / rhs);
    rep.worst_margin = std::min(rep.worst_margin, rep.margins.back());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// closed-form checks against quadrature

/// K (-Delta)^{alpha/2} (1-|y|^2)_+^{alpha/2} at the point (r, 0, ...), by quadrature.
inline double getoor_value(int d, double alpha, double r, const QuadratureOptions& opt = {}) {
  if (d < 1 || d > 3) throw domain_error("verify_getoor: d must be 1, 2 or 3");
  if (!(alpha > 0.0 && alpha < 2.0)) throw domain_error("verify_getoor: alpha must lie in (0, 2)");
  if (!(r >= 0.0 && r < 1.0)) throw domain_error("verify_getoor: radii must lie in [0, 1)");
  auto phi = [alpha](std::span<const double> y) {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    return r2 < 1.0 ? std::pow(1.0 - r2, 0.5 * alpha) : 0.0;
  };
  const std::array<double, 3> x{r, 0.0, 0.0};
  return getoor_constant(d, alpha) *
         frac_laplacian_quadrature(phi, std::span<const double>(x.data(), static_cast<std::size_t>(d)), alpha, d,
                                   SupportBall{}, opt);
}

/// max over radii of |K (-Delta)^{alpha/2} (1-|y|^2)_+^{alpha/2} - 1| along the first axis.
inline double verify_getoor(int d, double alpha, std::span<const double> radii, const QuadratureOptions& opt = {}) {
  double worst = 0.0;
  for (double r : radii) worst = std::max(worst, std::abs(getoor_value(d, alpha, r, opt) - 1.0));
  return worst;
}

/// max over radii of |closed form - quadrature| / |quadrature| for I_beta (1-|y|^2)_+^{gamma/2}.
inline double verify_lemma(double gamma, double beta, int d, std::span<const double> radii, const QuadratureOptions& opt = {}) {
  if (d < 1 || d > 3) throw domain_error("verify_lemma: d must be 1, 2 or 3");
  auto f = [gamma](std::span<const double> y) {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    return r2 < 1.0 ? std::pow(1.0 - r2, 0.5 * gamma) : 0.0;
  };
  double worst = 0.0;
  for (double r : radii) {
    if (r >= 0.95 && r <= 1.05) throw domain_error("verify_lemma: radii must avoid [0.95, 1.05]");
    const std::array<double, 3> x{r, 0.0, 0.0};
    const double quad =
        riesz_quadrature(f, std::span<const double>(x.data(), static_cast<std::size_t>(d)), beta, d, SupportBall{}, opt);
    worst = std::max(worst, std::abs(riesz_profile_closed_form(r, gamma, beta, d) - quad) / std::abs(quad));
  }
  return worst;
}

/// max over modes of |div grad^{alpha-1} f + (-Delta)^{alpha/2} f| on a smooth random field.
inline double operator_identity_residual(const Grid& grid, double alpha, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<std::array<double, 4>> modes(8);
  for (auto& md : modes) md = {coef(rng), coef(rng), std::floor(8.0 * (coef(rng) + 1.0)), std::floor(8.0 * (coef(rng) + 1.0))};
  const Field f = sample_field(grid, [&](std::span<const double> x) {
    double acc = 0.0;
    for (const auto& md : modes) {
      double phase = md[2] * std::numbers::pi * x[0] / grid.L;
      if (x.size() > 1) phase += md[3] * std::numbers::pi * x[1] / grid.L;
      acc += md[0] * std::cos(phase) + md[1] * std::sin(phase);
    }
    return acc;
  });
  SpectralWorkspace ws(grid);
  const Field lhs = divergence_spectral(frac_gradient_spectral(f, alpha - 1.0, ws), ws);
  const Field rhs = frac_laplacian_spectral(f, alpha, ws);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(lhs[i] + rhs[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// weak form

/// C-infinity step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

inline double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  const double da = a / (s * s);
  const double db = -b / ((1.0 - s) * (1.0 - s));
  return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

/// phi(t, x) = theta(t) psi(x): theta = 1 up to t_on, 0 from t_off; psi = 1 for |x - c| <= inner,
/// 0 for |x - c| >= outer, smooth in between.
struct TestFunction {
  std::array<double, 2> center{0.0, 0.0};
  double inner = 0.0;
  double outer = 1.0;
  double t_on = 0.0;
  double t_off = 1.0;

  double theta(double t) const { return smooth_step((t_off - t) / (t_off - t_on)); }
  double theta_dot(double t) const { return -smooth_step_derivative((t_off - t) / (t_off - t_on)) / (t_off - t_on); }

  double psi(const std::array<double, 2>& x, int d) const {
    const double r = radius(x, d);
    return smooth_step((outer - r) / (outer - inner));
  }

  std::array<double, 2> grad_psi(const std::array<double, 2>& x, int d) const {
    const double r = radius(x, d);
    if (r == 0.0) return {0.0, 0.0};
    const double g = -smooth_step_derivative((outer - r) / (outer - inner)) / (outer - inner);
    return {g * (x[0] - center[0]) / r, d == 2 ? g * (x[1] - center[1]) / r : 0.0};
  }

 private:
  double radius(const std::array<double, 2>& x, int d) const {
    const double dx = x[0] - center[0];
    const double dy = d == 2 ? x[1] - center[1] : 0.0;
    return std::hypot(dx, dy);
  }
};

/// Default test function for a run on [t0, t_end]: bump of radius L/4 around the origin,
/// switched off over the middle half of the time interval.
inline TestFunction default_test_function(const Grid& grid, double t0, double t_end) {
  TestFunction tf;
  tf.inner = 0.0;
  tf.outer = grid.L / 4.0;
  tf.t_on = t0 + 0.25 * (t_end - t0);
  tf.t_off = t0 + 0.75 * (t_end - t0);
  return tf;
}

struct WeakResidualTerms {
  double initial = 0.0;   // int u0 phi(t0)
  double time = 0.0;      // int int u phi_t
  double flux = 0.0;      // int int u w . grad phi
  double residual = 0.0;  // initial + time - flux
};

/// Terms of the weak formulation evaluated on the trajectory snapshots. u is taken
/// piecewise linear in time between snapshots, so the phi_t term reduces to integrals of
/// theta alone; the flux term uses the trapezoid rule over snapshots.
inline WeakResidualTerms weak_residual_terms(const Trajectory& traj, const MediumParams& mp, const TestFunction& tf) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2) throw domain_error("weak_residual: need at least two snapshots");
  const Grid& grid = snaps.front().u.grid;
  if (mp.d != grid.d) throw domain_error("weak_residual: dimension mismatch");
  const double t0 = snaps.front().t;
  const double t_end = snaps.back().t;
  if (!(tf.t_on >= t0 && tf.t_off > tf.t_on && tf.t_off < t_end)) {
    throw domain_error("weak_residual: test function must switch off strictly inside the time interval");
  }
  if (!(tf.outer > tf.inner && tf.inner >= 0.0)) throw domain_error("weak_residual: invalid test-function radii");
  if (std::hypot(tf.center[0], tf.center[1]) + tf.outer >= grid.L) {
    throw domain_error("weak_residual: test-function support leaves the box");
  }

  std::vector<double> psi(grid.size());
  std::vector<std::array<double, 2>> grad(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    psi[i] = tf.psi(x, grid.d);
    grad[i] = tf.grad_psi(x, grid.d);
  }
  const double vol = grid.cell_volume();
  auto psi_moment = [&](const Field& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * psi[i];
    return s * vol;
  };

  SpectralWorkspace ws(grid);
  std::vector<double> moments;
  std::vector<double> fluxes;
  for (const auto& snap : snaps) {
    moments.push_back(psi_moment(snap.u));
    const VectorField w = compute_velocity(snap.u, mp, ws);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double dot = w.components[0][i] * grad[i][0];
      if (grid.d == 2) dot += w.components[1][i] * grad[i][1];
      s += snap.u[i] * dot;
    }
    fluxes.push_back(s * vol);
  }

  using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
  WeakResidualTerms out;
  out.initial = moments.front() * tf.theta(t0);
  for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
    const double a = snaps[k].t;
    const double b = snaps[k + 1].t;
    const double dt = b - a;
    if (!(dt > 0.0)) throw domain_error("weak_residual: snapshot times must increase");
    // i1 = int_a^b theta'(t) s dt with s = (t - a)/dt, by parts; i0 + i1 = theta(b) - theta(a)
    const double theta_mean = gk::integrate([&](double t) { return tf.theta(t); }, a, b, 15, 1e-14) / dt;
    const double i1 = tf.theta(b) - theta_mean;
    const double i0 = theta_mean - tf.theta(a);
    out.time += moments[k] * i0 + moments[k + 1] * i1;
    out.flux += 0.5 * dt * (tf.theta(a) * fluxes[k] + tf.theta(b) * fluxes[k + 1]);
  }
  out.residual = out.initial + out.time - out.flux;
  return out;
}

inline double weak_residual(const Trajectory& traj, const MediumParams& mp, const TestFunction& tf) {
  return weak_residual_terms(traj, mp, tf).residual;
}

/// Trajectory made of exact Barenblatt samples at the given times.
inline Trajectory exact_trajectory(const BarenblattSpec& spec, const Grid& grid, std::span<const double> times) {
  Trajectory traj;
  for (double t : times) {
    Field u = exact_field(spec, grid, t);
    traj.series.push_back(detail::make_row(t, u, 0.0));
    traj.snapshots.push_back({t, std::move(u)});
  }
  return traj;
}

// ---------------------------------------------------------------------------
// interface regularity

/// Log-log slope of Phi(y) against R - |y| for |y| = R (1 - 10^{-k}), k in [2, 4].
inline double holder_fit(const BarenblattSpec& spec, std::size_t samples = 41) {
  spec.validate();
  const double s = spec.params.alpha / (2.0 * (spec.params.m - 1.0));
  if (s > 1.0) throw domain_error("holder_fit: alpha/(2(m-1)) > 1, the profile is differentiable at the interface");
  if (samples < 2) throw domain_error("holder_fit: need at least two samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> y(static_cast<std::size_t>(spec.params.d), 0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const double k = 2.0 + 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double gap = spec.R * std::pow(10.0, -k);
    y[0] = spec.R - gap;
    const double lx = std::log(gap);
    const double ly = std::log(phi_value(spec, y));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(samples);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nlpme
