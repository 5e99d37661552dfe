#pragma once

// Command-line front end: profile, verify, evolve, decay.
// Exit codes: 0 all checks passed, 1 a check failed or the run aborted, 2 usage or config error.

#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlpme/diagnostics.hpp"
#include "nlpme/errors.hpp"
#include "nlpme/profiles.hpp"
#include "nlpme/report.hpp"
#include "nlpme/solver.hpp"

namespace nlpme::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Config or flag problem detected after parsing; maps to exit code 2.
class usage_error : public std::runtime_error {
 public:
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct RunManifest {
  std::string command;
  json config = json::object();
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;
  std::vector<Check> checks;
  std::string error;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return error.empty();
  }

  json to_json() const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["artifacts"] = artifacts;
    j["wall_seconds"] = wall_seconds;
    json cs = json::array();
    for (const auto& c : checks) {
      cs.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    }
    j["checks"] = cs;
    j["passed"] = all_passed();
    if (!error.empty()) j["error"] = error;
    return j;
  }
};

namespace detail {

// value <= tol
inline Check upper_check(std::string name, double value, double tol) {
  return Check{std::move(name), value, tol, value <= tol};
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << text;
}

inline void write_manifest(RunManifest& manifest, const fs::path& path) {
  manifest.artifacts.push_back(path.string());
  write_text(path, manifest.to_json().dump(2) + "\n");
}

inline void write_raw_f64(const fs::path& path, const std::vector<double>& values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  write_text(path, bytes);
}

inline std::vector<double> read_raw_f64(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) throw usage_error("'" + path.string() + "' is not a whole number of float64 values");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)])) << (8 * b);
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

inline std::string grid_csv(const Field& f, const std::string& value_name) {
  CsvTable t(f.grid.d == 1 ? std::vector<std::string>{"x", value_name} : std::vector<std::string>{"x", "y", value_name});
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = f.grid.point(i);
    if (f.grid.d == 1) {
      t.add_numbers({p[0], f[i]});
    } else {
      t.add_numbers({p[0], p[1], f[i]});
    }
  }
  return t.str();
}

// Reads the value column (last column) of a CSV produced by grid_csv.
inline std::vector<double> read_value_column(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(f, line);  // header
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split_list(line);
    if (cells.empty()) continue;
    try {
      out.push_back(parse_number(cells.back()));
    } catch (const domain_error& e) {
      throw usage_error(path.string() + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<double> parse_p_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) {
    try {
      out.push_back(parse_number(tok));
    } catch (const domain_error&) {
      throw usage_error("invalid p value '" + tok + "'");
    }
    if (!(out.back() >= 1.0)) throw usage_error("p values must be >= 1");
  }
  if (out.empty()) throw usage_error("empty --p-list");
  return out;
}

inline std::string p_label(double p) { return std::isinf(p) ? "inf" : format_number(p); }

}  // namespace detail

// ---------------------------------------------------------------------------
// evolve configuration

struct EvolveSetup {
  CauchyConfig cauchy;
  std::optional<BarenblattSpec> exact;  // set for Barenblatt initial data
  double l1_tolerance = 2e-2;
  json resolved;
};

namespace detail {

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw usage_error(std::string("config: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw usage_error(std::string("config: key '") + key + "' has the wrong type");
  }
}

template <class T>
T optional_key(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw usage_error(std::string("config: key '") + key + "' has the wrong type");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw usage_error(std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace detail

/// Builds the solver configuration from a JSON document (see README for the schema).
inline EvolveSetup parse_evolve_config(const json& j, const fs::path& base_dir = {}) {
  using namespace detail;
  if (!j.is_object()) throw usage_error("config: top level must be an object");
  reject_unknown(j, {"d", "m", "alpha", "L", "n", "t0", "t_end", "cfl", "epsilon", "snapshot_times", "initial", "l1_tolerance"},
                 "config");
  EvolveSetup s;
  auto& c = s.cauchy;
  c.params = MediumParams{required<int>(j, "d"), required<double>(j, "m"), required<double>(j, "alpha")};
  c.grid = Grid{c.params.d, required<double>(j, "L"), required<std::size_t>(j, "n")};
  c.t0 = required<double>(j, "t0");
  c.t_end = required<double>(j, "t_end");
  c.cfl = optional_key<double>(j, "cfl", 0.95);
  c.epsilon = optional_key<double>(j, "epsilon", 0.0);
  c.snapshot_times = optional_key<std::vector<double>>(j, "snapshot_times", {c.t_end});
  s.l1_tolerance = optional_key<double>(j, "l1_tolerance", 2e-2);
  try {
    c.params.validate();
    c.grid.validate();
  } catch (const domain_error& e) {
    throw usage_error(std::string("config: ") + e.what());
  }
  if (!(c.t0 > 0.0)) throw usage_error("config: t0 must be > 0");

  if (!j.contains("initial") || !j.at("initial").is_object()) throw usage_error("config: missing object 'initial'");
  const json& init = j.at("initial");
  const auto type = required<std::string>(init, "type");
  json resolved_init;
  if (type == "barenblatt") {
    reject_unknown(init, {"type", "R", "mass"}, "config.initial");
    const bool has_r = init.contains("R");
    const bool has_mass = init.contains("mass");
    if (has_r == has_mass) throw usage_error("config.initial: give exactly one of 'R' or 'mass'");
    double R = 0.0;
    try {
      R = has_r ? required<double>(init, "R") : radius_for_mass(c.params, required<double>(init, "mass"));
      s.exact = BarenblattSpec{c.params, R};
      s.exact->validate();
    } catch (const domain_error& e) {
      throw usage_error(std::string("config.initial: ") + e.what());
    }
    c.u0 = exact_field(*s.exact, c.grid, c.t0);
    resolved_init = {{"type", "barenblatt"}, {"R", R}};
    if (has_mass) resolved_init["mass"] = init.at("mass");
  } else if (type == "file") {
    reject_unknown(init, {"type", "path"}, "config.initial");
    fs::path path = required<std::string>(init, "path");
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    const std::vector<double> values =
        path.extension() == ".bin" ? read_raw_f64(path) : read_value_column(path);
    if (values.size() != c.grid.size()) {
      throw usage_error("config.initial: '" + path.string() + "' holds " + std::to_string(values.size()) +
                        " values, grid needs " + std::to_string(c.grid.size()));
    }
    c.u0 = Field(c.grid, values);
    resolved_init = {{"type", "file"}, {"path", path.string()}};
  } else {
    throw usage_error("config.initial: unknown type '" + type + "'");
  }

  s.resolved = {{"d", c.params.d},   {"m", c.params.m},         {"alpha", c.params.alpha}, {"L", c.grid.L},
                {"n", c.grid.n},     {"t0", c.t0},              {"t_end", c.t_end},        {"cfl", c.cfl},
                {"epsilon", c.epsilon}, {"snapshot_times", c.snapshot_times}, {"initial", resolved_init},
                {"l1_tolerance", s.l1_tolerance}};
  return s;
}

inline EvolveSetup load_evolve_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw usage_error("config '" + path.string() + "': " + e.what());
  }
  return parse_evolve_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// commands

struct ProfileArgs {
  int d = 1;
  double m = 2.0;
  double alpha = 1.0;
  std::optional<double> R;
  std::optional<double> mass;
  std::size_t n = 256;
  double L = 4.0;
  std::optional<double> t;
  std::string out = "profile.csv";
};

inline int cmd_profile(const ProfileArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (a.R.has_value() == a.mass.has_value()) throw usage_error("profile: give exactly one of --R or --mass");
  BarenblattSpec spec;
  Grid grid{a.d, a.L, a.n};
  try {
    spec.params = MediumParams{a.d, a.m, a.alpha};
    spec.params.validate();
    grid.validate();
    spec.R = a.R ? *a.R : radius_for_mass(spec.params, *a.mass);
    spec.validate();
    if (a.t && !(*a.t > 0.0)) throw domain_error("--t must be > 0");
  } catch (const domain_error& e) {
    throw usage_error(std::string("profile: ") + e.what());
  }

  const Field f = a.t ? exact_field(spec, grid, *a.t)
                      : sample_field(grid, [&](std::span<const double> y) { return phi_value(spec, y); });
  const fs::path out_path = a.out;
  if (out_path.has_parent_path()) detail::ensure_dir(out_path.parent_path());
  detail::write_text(out_path, detail::grid_csv(f, a.t ? "u" : "phi"));

  const double time = a.t.value_or(1.0);
  KeyValueBlock kv;
  kv.add("R", spec.R)
      .add("mass", profile_mass(spec))
      .add("grid_mass", total_mass(f))
      .add("support_radius", a.t ? interface_radius(spec, time) : spec.R)
      .add("holder_exponent", holder_exponent(spec.params))
      .add("lambda", lambda_exponent(spec.params))
      .add("k", barenblatt_k(spec.params));
  out << kv.str();

  RunManifest manifest;
  manifest.command = "profile";
  manifest.config = {{"d", a.d}, {"m", a.m}, {"alpha", a.alpha}, {"R", spec.R}, {"n", a.n}, {"L", a.L}};
  if (a.mass) manifest.config["mass"] = *a.mass;
  if (a.t) manifest.config["t"] = *a.t;
  manifest.artifacts.push_back(out_path.string());
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::path manifest_path = out_path;
  manifest_path.replace_extension(".manifest.json");
  detail::write_manifest(manifest, manifest_path);
  return kExitPass;
}

struct VerifyArgs {
  std::string target = "all";
  int d = 1;
  std::optional<double> alpha;
  std::size_t n = 256;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string out_dir = ".";
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::array<std::string, 5> targets{"getoor", "lemma", "ops", "inequalities", "all"};
  if (std::find(targets.begin(), targets.end(), a.target) == targets.end()) {
    throw usage_error("verify: unknown target '" + a.target + "'");
  }
  if (a.alpha && !(*a.alpha > 0.0 && *a.alpha < 2.0)) throw usage_error("verify: --alpha must lie in (0, 2)");
  if (a.d < 1 || a.d > 3) throw usage_error("verify: --d must be 1, 2 or 3");
  if (a.tol && !(*a.tol >= 0.0)) throw usage_error("verify: --tol must be >= 0");
  if (a.trials == 0) throw usage_error("verify: --trials must be > 0");
  try {
    Grid{1, 1.0, a.n}.validate();
  } catch (const domain_error& e) {
    throw usage_error(std::string("verify: --n: ") + e.what());
  }
  const bool all = a.target == "all";
  const fs::path dir = a.out_dir;
  detail::ensure_dir(dir);

  RunManifest manifest;
  manifest.command = "verify " + a.target;
  manifest.config = {{"target", a.target}, {"d", a.d}, {"n", a.n}, {"trials", a.trials}, {"seed", a.seed}};
  if (a.alpha) manifest.config["alpha"] = *a.alpha;
  if (a.tol) manifest.config["tol"] = *a.tol;
  const std::vector<double> alphas = a.alpha ? std::vector<double>{*a.alpha} : std::vector<double>{0.5, 1.0, 1.5};
  KeyValueBlock kv;

  if (all || a.target == "getoor") {
    const double tol = a.tol.value_or(5e-3);
    const std::vector<double> radii{0.0, 0.3, 0.6, 0.9};
    CsvTable t({"d", "alpha", "radius", "K_times_value", "error"});
    for (double alpha : alphas) {
      double worst = 0.0;
      for (double r : radii) {
        const double v = getoor_value(a.d, alpha, r);
        t.add_numbers({static_cast<double>(a.d), alpha, r, v, std::abs(v - 1.0)});
        worst = std::max(worst, std::abs(v - 1.0));
      }
      manifest.checks.push_back(detail::upper_check("getoor_d" + std::to_string(a.d) + "_alpha" + format_number(alpha), worst, tol));
      kv.add("getoor_alpha_" + format_number(alpha) + "_max_error", worst);
    }
    const fs::path p = dir / "verify_getoor.csv";
    t.write(p.string());
    manifest.artifacts.push_back(p.string());
  }

  if (all || a.target == "lemma") {
    struct Case {
      double gamma, beta;
    };
    const double a2 = a.alpha.value_or(1.2);
    const std::vector<Case> cases{{1.0, 1.0}, {a2, 2.0 - a2}};
    const std::vector<double> interior{0.0, 0.3, 0.6};
    const std::vector<double> exterior{1.5, 2.0, 3.0};
    CsvTable t({"gamma", "beta", "d", "radius", "closed_form", "relative_error"});
    for (const auto& cs : cases) {
      for (const auto* radii : {&interior, &exterior}) {
        const bool inside = radii == &interior;
        double worst = 0.0;
        for (double r : *radii) {
          const double err = verify_lemma(cs.gamma, cs.beta, 3, std::span<const double>(&r, 1));
          t.add_numbers({cs.gamma, cs.beta, 3.0, r, riesz_profile_closed_form(r, cs.gamma, cs.beta, 3), err});
          worst = std::max(worst, err);
        }
        const std::string name = std::string("lemma_") + (inside ? "interior" : "exterior") + "_gamma" +
                                 format_number(cs.gamma) + "_beta" + format_number(cs.beta);
        manifest.checks.push_back(detail::upper_check(name, worst, a.tol.value_or(inside ? 1e-3 : 1e-2)));
        kv.add(name + "_max_rel_error", worst);
      }
    }
    const fs::path p = dir / "verify_lemma.csv";
    t.write(p.string());
    manifest.artifacts.push_back(p.string());
  }

  if (all || a.target == "ops") {
    const double tol = a.tol.value_or(1e-12);
    CsvTable t({"d", "n", "alpha", "residual"});
    for (int d : {1, 2}) {
      const Grid grid{d, 4.0, d == 1 ? a.n : std::min<std::size_t>(a.n, 128)};
      for (double alpha : alphas) {
        const double res = operator_identity_residual(grid, alpha, a.seed);
        t.add_numbers({static_cast<double>(d), static_cast<double>(grid.n), alpha, res});
        manifest.checks.push_back(
            detail::upper_check("ops_d" + std::to_string(d) + "_alpha" + format_number(alpha), res, tol));
      }
    }
    const fs::path p = dir / "verify_ops.csv";
    t.write(p.string());
    manifest.artifacts.push_back(p.string());
  }

  if (all || a.target == "inequalities") {
    const double tol = a.tol.value_or(1e-10);
    AuditOptions opt;
    opt.trials = a.trials;
    opt.seed = a.seed;
    CsvTable t({"inequality", "alpha", "exponent", "trial", "margin"});
    CsvTable summary({"inequality", "alpha", "exponent", "trials", "worst_margin", "empirical_constant", "a", "b", "r"});
    auto record = [&](const InequalityReport& rep) {
      for (std::size_t i = 0; i < rep.margins.size(); ++i) {
        t.add_row({rep.name, format_number(rep.alpha), format_number(rep.exponent), format_number(i),
                   format_number(rep.margins[i])});
      }
      summary.add_row({rep.name, format_number(rep.alpha), format_number(rep.exponent), format_number(rep.trials),
                       format_number(rep.worst_margin),
                       rep.empirical_constant ? format_number(*rep.empirical_constant) : "",
                       rep.abr ? format_number((*rep.abr)[0]) : "", rep.abr ? format_number((*rep.abr)[1]) : "",
                       rep.abr ? format_number((*rep.abr)[2]) : ""});
      manifest.checks.push_back(Check{rep.name + "_alpha" + format_number(rep.alpha) + "_exp" + format_number(rep.exponent),
                                      rep.worst_margin, -tol, rep.worst_margin >= -tol});
    };
    for (double alpha : alphas) {
      record(nash_suite(alpha, opt));
      for (double q : {1.5, 2.0, 3.0}) {
        record(stroock_varopoulos_suite(alpha, q, opt));
        record(gagliardo_nirenberg_suite(alpha, q, 2.0, opt));
      }
      kv.add("nash_alpha_" + format_number(alpha) + "_constant", *nash_suite(alpha, opt).empirical_constant);
    }
    const fs::path p = dir / "verify_inequalities.csv";
    const fs::path ps = dir / "verify_inequalities_summary.csv";
    t.write(p.string());
    summary.write(ps.string());
    manifest.artifacts.push_back(p.string());
    manifest.artifacts.push_back(ps.string());
  }

  for (const auto& c : manifest.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
        << " tol=" << format_number(c.tolerance) << "\n";
  }
  out << kv.str();
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_manifest(manifest, dir / "manifest.json");
  return manifest.all_passed() ? kExitPass : kExitFail;
}

namespace detail {

inline CsvTable series_table(const Trajectory& traj) {
  CsvTable t({"t", "mass", "l1", "l2", "linf", "support_radius", "dt"});
  for (const auto& r : traj.series) t.add_numbers({r.t, r.mass, r.l1, r.l2, r.linf, r.support_radius, r.dt});
  return t;
}

inline void write_snapshots(const Trajectory& traj, const fs::path& dir, RunManifest& manifest) {
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& snap = traj.snapshots[k];
    char stem[32];
    std::snprintf(stem, sizeof stem, "snapshot_%03zu", k);
    if (snap.u.grid.d == 1) {
      const fs::path p = dir / (std::string(stem) + ".csv");
      write_text(p, grid_csv(snap.u, "u"));
      manifest.artifacts.push_back(p.string());
    } else {
      const fs::path p = dir / (std::string(stem) + ".bin");
      const fs::path side = dir / (std::string(stem) + ".json");
      write_raw_f64(p, snap.u.values);
      write_text(side, json{{"n", snap.u.grid.n}, {"L", snap.u.grid.L}, {"t", snap.t}}.dump(2) + "\n");
      manifest.artifacts.push_back(p.string());
      manifest.artifacts.push_back(side.string());
    }
  }
}

inline double max_mass_drift(const Trajectory& traj) {
  const double m0 = traj.series.front().mass;
  double drift = 0.0;
  for (const auto& r : traj.series) drift = std::max(drift, std::abs(r.mass - m0));
  return m0 != 0.0 ? drift / std::abs(m0) : drift;
}

// Runs the solver; on blow-up records the error, writes the manifest and returns nullopt.
inline std::optional<Trajectory> guarded_run(const CauchyConfig& cfg, RunManifest& manifest, const fs::path& dir,
                                             std::ostream& out) {
  try {
    return run(cfg);
  } catch (const domain_error& e) {
    throw usage_error(std::string("config: ") + e.what());
  } catch (const std::runtime_error& e) {
    manifest.error = e.what();
    out << "ABORT " << e.what() << "\n";
    write_manifest(manifest, dir / "manifest.json");
    return std::nullopt;
  }
}

}  // namespace detail

struct EvolveArgs {
  std::string config;
  std::string out_dir = ".";
};

inline int cmd_evolve(const EvolveArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const EvolveSetup setup = load_evolve_config(a.config);
  const fs::path dir = a.out_dir;
  detail::ensure_dir(dir);
  RunManifest manifest;
  manifest.command = "evolve";
  manifest.config = setup.resolved;

  const auto traj = detail::guarded_run(setup.cauchy, manifest, dir, out);
  if (!traj) return kExitFail;

  const fs::path series = dir / "series.csv";
  detail::series_table(*traj).write(series.string());
  manifest.artifacts.push_back(series.string());
  detail::write_snapshots(*traj, dir, manifest);

  KeyValueBlock kv;
  kv.add("steps", traj->steps).add("t_final", traj->series.back().t).add("clipped_total", traj->clipped_total);
  const double drift = detail::max_mass_drift(*traj);
  manifest.checks.push_back(detail::upper_check("mass_drift", drift, 1e-10));
  kv.add("mass_drift", drift);
  if (setup.exact && !traj->snapshots.empty()) {
    const auto& last = traj->snapshots.back();
    const double err = relative_l1_error(last.u, exact_field(*setup.exact, last.u.grid, last.t));
    manifest.checks.push_back(detail::upper_check("l1_error_vs_exact", err, setup.l1_tolerance));
    kv.add("l1_error_vs_exact", err).add("l1_error_time", last.t);
  }
  out << kv.str();
  for (const auto& c : manifest.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_manifest(manifest, dir / "manifest.json");
  return manifest.all_passed() ? kExitPass : kExitFail;
}

struct DecayArgs {
  std::string config;
  std::string p_list = "1,2,inf";
  std::string fit_window = "2,16";
  std::optional<double> cn;
  std::string out_dir = ".";
};

inline int cmd_decay(const DecayArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  EvolveSetup setup = load_evolve_config(a.config);
  const std::vector<double> ps = detail::parse_p_list(a.p_list);
  const auto window_tokens = split_list(a.fit_window);
  if (window_tokens.size() != 2) throw usage_error("--fit-window must be 't_min,t_max'");
  double t_min = 0.0, t_max = 0.0;
  try {
    t_min = parse_number(window_tokens[0]);
    t_max = parse_number(window_tokens[1]);
  } catch (const domain_error& e) {
    throw usage_error(std::string("--fit-window: ") + e.what());
  }
  auto& cfg = setup.cauchy;
  if (!(t_min >= cfg.t0 && t_max > t_min && t_max <= cfg.t_end)) {
    throw usage_error("--fit-window must satisfy t0 <= t_min < t_max <= t_end");
  }
  if (a.cn && !(*a.cn > 0.0)) throw usage_error("--cn must be > 0");
  // log-spaced snapshots across the window serve the p values not tracked in the series
  std::vector<double> times = cfg.snapshot_times;
  constexpr int kWindowSamples = 33;
  for (int i = 0; i < kWindowSamples; ++i) {
    times.push_back(t_min * std::pow(t_max / t_min, static_cast<double>(i) / (kWindowSamples - 1)));
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
              times.end());
  cfg.snapshot_times = times;

  const fs::path dir = a.out_dir;
  detail::ensure_dir(dir);
  RunManifest manifest;
  manifest.command = "decay";
  manifest.config = setup.resolved;
  manifest.config["p_list"] = a.p_list;
  manifest.config["fit_window"] = {t_min, t_max};
  if (a.cn) manifest.config["cn"] = *a.cn;

  const auto traj = detail::guarded_run(cfg, manifest, dir, out);
  if (!traj) return kExitFail;

  CsvTable reports({"p", "fitted_slope", "theoretical_slope", "relative_deviation", "absolute_deviation", "t_min", "t_max",
                    "points", "M", "C_N", "C_theory", "bound_ratio"});
  CsvTable points({"p", "t", "norm"});
  for (double p : ps) {
    DecayReport rep;
    try {
      rep = fit_decay(*traj, cfg.params, p, t_min, t_max, a.cn);
    } catch (const domain_error& e) {
      throw usage_error(std::string("decay: ") + e.what());
    }
    reports.add_row({detail::p_label(p), format_number(rep.fitted_slope), format_number(rep.theoretical_slope),
                     format_number(rep.relative_deviation()), format_number(rep.absolute_deviation()), format_number(t_min),
                     format_number(t_max), format_number(rep.points.size()), format_number(rep.mass),
                     rep.c_nash ? format_number(*rep.c_nash) : "", rep.c_theory ? format_number(*rep.c_theory) : "",
                     rep.bound_ratio ? format_number(*rep.bound_ratio) : ""});
    for (const auto& pt : rep.points) points.add_row({detail::p_label(p), format_number(pt.t), format_number(pt.value)});
    // slope 0 (p = 1) is judged in absolute terms
    const bool flat = rep.theoretical_slope == 0.0;
    manifest.checks.push_back(detail::upper_check("slope_p" + detail::p_label(p),
                                                  flat ? rep.absolute_deviation() : rep.relative_deviation(),
                                                  flat ? 0.01 : 0.10));
    out << "p=" << detail::p_label(p) << " fitted=" << format_number(rep.fitted_slope)
        << " theory=" << format_number(rep.theoretical_slope) << "\n";
  }
  const fs::path rp = dir / "decay.csv";
  const fs::path pp = dir / "decay_points.csv";
  const fs::path sp = dir / "series.csv";
  reports.write(rp.string());
  points.write(pp.string());
  detail::series_table(*traj).write(sp.string());
  manifest.artifacts.insert(manifest.artifacts.end(), {rp.string(), pp.string(), sp.string()});
  for (const auto& c : manifest.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_manifest(manifest, dir / "manifest.json");
  return manifest.all_passed() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// entry point

/// Parses argv and dispatches. Never throws; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Nonlocal porous medium equation laboratory", "nlpme"};
  app.require_subcommand(1);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Sample the self-similar profile or solution on a grid");
  profile->add_option("--d", pa.d, "dimension (1 or 2)");
  profile->add_option("--m", pa.m, "nonlinearity exponent m > 1");
  profile->add_option("--alpha", pa.alpha, "order alpha in (0, 2]");
  auto* r_opt = profile->add_option("--R", pa.R, "support radius of the profile");
  auto* mass_opt = profile->add_option("--mass", pa.mass, "total mass (determines R)");
  r_opt->excludes(mass_opt);
  profile->add_option("--n", pa.n, "points per dimension (power of two)");
  profile->add_option("--L", pa.L, "box half-width");
  profile->add_option("--t", pa.t, "sample u(t, .) instead of the profile");
  profile->add_option("--out", pa.out, "output CSV");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("target", va.target, "getoor | lemma | ops | inequalities | all")
      ->check(CLI::IsMember({"getoor", "lemma", "ops", "inequalities", "all"}));
  verify->add_option("--d", va.d, "dimension for the Getoor check");
  verify->add_option("--alpha", va.alpha, "restrict to one alpha");
  verify->add_option("--n", va.n, "grid size for the operator identity");
  verify->add_option("--trials", va.trials, "random fields per inequality suite");
  verify->add_option("--seed", va.seed, "RNG seed");
  verify->add_option("--tol", va.tol, "override every tolerance");
  verify->add_option("--out-dir", va.out_dir, "output directory");

  EvolveArgs ea;
  auto* evolve = app.add_subcommand("evolve", "Integrate the Cauchy problem from a JSON config");
  evolve->add_option("--config", ea.config, "JSON config")->required();
  evolve->add_option("--out-dir", ea.out_dir, "output directory");

  DecayArgs da;
  auto* decay = app.add_subcommand("decay", "Fit L^p decay rates on a solver run");
  decay->add_option("--config", da.config, "JSON config")->required();
  decay->add_option("--p-list", da.p_list, "comma-separated p values, e.g. 1,2,inf");
  decay->add_option("--fit-window", da.fit_window, "t_min,t_max");
  decay->add_option("--cn", da.cn, "Nash constant for the explicit decay constant");
  decay->add_option("--out-dir", da.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (profile->parsed()) return cmd_profile(pa, out);
    if (verify->parsed()) return cmd_verify(va, out);
    if (evolve->parsed()) return cmd_evolve(ea, out);
    if (decay->parsed()) return cmd_decay(da, out);
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace nlpme::cli
