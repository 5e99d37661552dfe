#pragma once

// Cauchy problem for u_t = div(u w), w = grad^{alpha-1}(|u|^{m-1}).
//
// The velocity is spectral; transport is a first-order upwind finite-volume
// update, which keeps mass exactly and preserves nonnegativity for
// cfl <= 1/(2d); larger Courant numbers rely on the logged clipping.
// Optional viscosity eps*Delta u is applied as the exact heat semigroup
// factor exp(-eps |xi|^2 dt) after each transport step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nlpme/errors.hpp"
#include "nlpme/fracops.hpp"
#include "nlpme/grid.hpp"
#include "nlpme/norms.hpp"
#include "nlpme/specfun.hpp"

namespace nlpme {

struct CauchyConfig {
  MediumParams params;
  Grid grid;
  Field u0;
  double t0 = 1.0;
  double t_end = 2.0;
  double cfl = 0.5;
  double epsilon = 0.0;
  std::vector<double> snapshot_times;
  double blowup_factor = 1e6;
  std::size_t max_steps = 10'000'000;
};

struct Snapshot {
  double t = 0.0;
  Field u;
};

struct SeriesRow {
  double t = 0.0;
  double mass = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double support_radius = 0.0;
  double dt = 0.0;  // step that produced this row; 0 for the initial row
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<SeriesRow> series;
  std::size_t steps = 0;
  double clipped_total = 0.0;  // total |negative mass| removed by clipping
};

/// w = grad^{alpha-1}(max(u,0)^{m-1}).
inline VectorField compute_velocity(const Field& u, const MediumParams& p, SpectralWorkspace& ws) {
  p.validate();
  Field pressure_source(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    if (!std::isfinite(v)) throw domain_error("compute_velocity: non-finite value");
    pressure_source[i] = v > 0.0 ? std::pow(v, p.m - 1.0) : 0.0;
  }
  return frac_gradient_spectral(pressure_source, p.alpha - 1.0, ws);
}

inline VectorField compute_velocity(const Field& u, const MediumParams& p) {
  SpectralWorkspace ws(u.grid);
  return compute_velocity(u, p, ws);
}

namespace detail {

// Calls visit(cell, neighbour, face_velocity) for every face along axis,
// neighbour being the cell on the + side (periodic).
template <class Visit>
void for_each_face(const Grid& g, const VectorField& w, int axis, Visit&& visit) {
  const std::size_t n = g.n;
  const auto& comp = w.components[static_cast<std::size_t>(axis)];
  if (g.d == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = (i + 1) % n;
      visit(i, r, 0.5 * (comp[i] + comp[r]));
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c = i * n + j;
      const std::size_t r = axis == 0 ? ((i + 1) % n) * n + j : i * n + (j + 1) % n;
      visit(c, r, 0.5 * (comp[c] + comp[r]));
    }
  }
}

// Largest face speed over faces touching a positive cell.
inline double max_active_face_speed(const Field& u, const VectorField& w) {
  double vmax = 0.0;
  for (int axis = 0; axis < u.grid.d; ++axis) {
    for_each_face(u.grid, w, axis, [&](std::size_t c, std::size_t r, double wf) {
      if (u[c] > 0.0 || u[r] > 0.0) vmax = std::max(vmax, std::abs(wf));
    });
  }
  return vmax;
}

}  // namespace detail

/// Largest stable transport step cfl * h / max|w_face|; +inf when nothing moves.
/// epsilon does not restrict the step because the viscous part is integrated exactly.
inline double stable_dt(const Field& u, const VectorField& w, double cfl, double epsilon = 0.0) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw domain_error("stable_dt: cfl must lie in (0, 1]");
  if (!(epsilon >= 0.0)) throw domain_error("stable_dt: epsilon must be >= 0");
  const double vmax = detail::max_active_face_speed(u, w);
  if (vmax == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * u.grid.h() / vmax;
}

namespace detail {

// max over resolved modes of sum_j (sin(xi_j h)/h) xi_j |xi|^{alpha-2}: the symbol of the
// discrete operator div_h . grad^{alpha-1} obtained from face averaging.
inline double pressure_symbol_bound(const Grid& g, double alpha) {
  const double h = g.h();
  double best = 0.0;
  auto term = [&](double xi) { return std::sin(xi * h) / h * xi; };
  if (g.d == 1) {
    for (std::size_t i = 1; i < g.n / 2; ++i) {
      const double xi = g.frequency(i);
      best = std::max(best, term(xi) * std::pow(xi, alpha - 2.0));
    }
    return best;
  }
  for (std::size_t i = 0; i <= g.n / 2; ++i) {
    for (std::size_t j = 0; j <= g.n / 2; ++j) {
      if ((i == 0 && j == 0) || g.is_nyquist(i) || g.is_nyquist(j)) continue;
      const double a = g.frequency(i);
      const double b = g.frequency(j);
      best = std::max(best, (term(a) + term(b)) * std::pow(std::hypot(a, b), alpha - 2.0));
    }
  }
  return best;
}

inline double pressure_dt_from_bound(const Field& u, const MediumParams& p, double cfl, double bound) {
  double peak = 0.0;
  for (double v : u.values) peak = std::max(peak, v);
  const double rate = (p.m - 1.0) * std::pow(peak, p.m - 1.0) * bound;
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * cfl / rate;
}

}  // namespace detail

/// Step limit from the pressure feedback: linearizing div(u grad^{alpha-1} u^{m-1}) about u gives
/// the nonlocal diffusion -(m-1) u^{m-1} (-Delta)^{alpha/2}, which explicit Euler resolves only for
/// dt <= 2 cfl / ((m-1) max u^{m-1} S_h). Irrelevant for alpha near 1, decisive as alpha -> 2.
inline double pressure_dt(const Field& u, const MediumParams& p, double cfl) {
  p.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw domain_error("pressure_dt: cfl must lie in (0, 1]");
  return detail::pressure_dt_from_bound(u, p, cfl, detail::pressure_symbol_bound(u.grid, p.alpha));
}

/// One explicit Euler upwind step of u_t = div(u w), then the viscous factor if epsilon > 0.
inline Field step(const Field& u, const VectorField& w, double dt, const MediumParams& p, double epsilon,
                  SpectralWorkspace& ws) {
  p.validate();
  if (!(dt >= 0.0)) throw domain_error("step: dt must be >= 0");
  if (!(epsilon >= 0.0)) throw domain_error("step: epsilon must be >= 0");
  const double h = u.grid.h();
  if (dt * detail::max_active_face_speed(u, w) > h * (1.0 + 1e-12)) {
    throw cfl_error("step: dt violates the CFL condition");
  }
  Field next = u;
  const double ratio = dt / h;
  for (int axis = 0; axis < u.grid.d; ++axis) {
    detail::for_each_face(u.grid, w, axis, [&](std::size_t c, std::size_t r, double wf) {
      // material velocity is -w: for wf > 0 mass flows from r into c
      double upwind;
      if (wf > 0.0) {
        upwind = u[r];
      } else if (wf < 0.0) {
        upwind = u[c];
      } else {
        upwind = 0.5 * (u[c] + u[r]);
      }
      const double flux = ratio * wf * upwind;
      next[c] += flux;
      next[r] -= flux;
    });
  }
  if (epsilon > 0.0 && dt > 0.0) next = heat_flow_spectral(next, epsilon * dt, ws);
  return next;
}

inline Field step(const Field& u, const VectorField& w, double dt, const MediumParams& p, double epsilon) {
  SpectralWorkspace ws(u.grid);
  return step(u, w, dt, p, epsilon, ws);
}

namespace detail {

inline SeriesRow make_row(double t, const Field& u, double dt) {
  return SeriesRow{t, total_mass(u), lp_norm(u, 1.0), lp_norm(u, 2.0), lp_norm(u, kInfNorm), support_radius(u), dt};
}

inline void validate_config(const CauchyConfig& cfg) {
  cfg.params.validate();
  cfg.grid.validate();
  if (cfg.params.d != cfg.grid.d) throw domain_error("CauchyConfig: params.d and grid.d differ");
  if (!(cfg.u0.grid == cfg.grid) || cfg.u0.size() != cfg.grid.size()) {
    throw domain_error("CauchyConfig: u0 does not live on the configured grid");
  }
  if (!(cfg.t0 > 0.0)) throw domain_error("CauchyConfig: t0 must be > 0");
  if (!(cfg.t_end >= cfg.t0)) throw domain_error("CauchyConfig: t_end must be >= t0");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw domain_error("CauchyConfig: cfl must lie in (0, 1]");
  if (!(cfg.epsilon >= 0.0)) throw domain_error("CauchyConfig: epsilon must be >= 0");
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    const double ts = cfg.snapshot_times[i];
    if (ts < cfg.t0 || ts > cfg.t_end) throw domain_error("CauchyConfig: snapshot time outside [t0, t_end]");
    if (i > 0 && !(ts > cfg.snapshot_times[i - 1])) throw domain_error("CauchyConfig: snapshot times must ascend");
  }
  const double h = cfg.grid.h();
  for (std::size_t i = 0; i < cfg.u0.size(); ++i) {
    const double v = cfg.u0[i];
    if (!std::isfinite(v)) throw domain_error("CauchyConfig: u0 has non-finite values");
    if (v < 0.0) throw domain_error("CauchyConfig: u0 must be nonnegative");
    if (v > 0.0) {
      const auto p = cfg.grid.point(i);
      if (std::sqrt(p[0] * p[0] + p[1] * p[1]) > 0.25 * cfg.grid.L + 0.5 * h) {
        throw domain_error("CauchyConfig: u0 support must lie in the ball of radius L/4");
      }
    }
  }
}

}  // namespace detail

/// Integrates from t0 to t_end with adaptive dt, recording every requested snapshot
/// and one series row per accepted step.
inline Trajectory run(const CauchyConfig& cfg) {
  detail::validate_config(cfg);
  SpectralWorkspace ws(cfg.grid);
  const double symbol_bound = detail::pressure_symbol_bound(cfg.grid, cfg.params.alpha);
  Trajectory traj;
  Field u = cfg.u0;
  double t = cfg.t0;
  const double linf0 = lp_norm(u, kInfNorm);
  const double time_eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));

  std::size_t next_snap = 0;
  auto record_due = [&]() {
    while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= t + time_eps) {
      traj.snapshots.push_back(Snapshot{t, u});
      ++next_snap;
    }
  };
  traj.series.push_back(detail::make_row(t, u, 0.0));
  record_due();

  while (t < cfg.t_end - time_eps) {
    if (traj.steps >= cfg.max_steps) throw convergence_error("run: step limit reached before t_end");
    const VectorField w = compute_velocity(u, cfg.params, ws);
    double dt = std::min(stable_dt(u, w, cfg.cfl, cfg.epsilon),
                         detail::pressure_dt_from_bound(u, cfg.params, cfg.cfl, symbol_bound));
    double target = cfg.t_end;
    if (next_snap < cfg.snapshot_times.size()) target = std::min(target, cfg.snapshot_times[next_snap]);
    bool lands = false;
    if (t + dt >= target - time_eps) {
      dt = target - t;
      lands = true;
    }
    u = step(u, w, dt, cfg.params, cfg.epsilon, ws);
    t = lands ? target : t + dt;
    ++traj.steps;

    for (double& v : u.values) {
      if (!std::isfinite(v)) throw blowup_error("run: non-finite value at t = " + std::to_string(t));
      if (v < -1e-14) {
        traj.clipped_total += -v * cfg.grid.cell_volume();
        v = 0.0;
      }
    }
    const SeriesRow row = detail::make_row(t, u, dt);
    if (linf0 > 0.0 && row.linf > cfg.blowup_factor * linf0) {
      throw blowup_error("run: sup norm exceeded blow-up guard at t = " + std::to_string(t));
    }
    traj.series.push_back(row);
    record_due();
  }
  return traj;
}

}  // namespace nlpme
