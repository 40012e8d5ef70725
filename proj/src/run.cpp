#include "ivse/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "ivse/crosscheck.hpp"
#include "ivse/dynamics.hpp"
#include "ivse/euler.hpp"
#include "ivse/kappa.hpp"
#include "ivse/oracle.hpp"

#ifndef IVSE_VERSION
#define IVSE_VERSION "0.0.0"
#endif

namespace ivse {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version() { return IVSE_VERSION; }

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON cannot hold inf/nan; such values are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json series(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

AxiGrid grid_of(const RunConfig& c) {
  return AxiGrid::make(*c.r_min, *c.r_max, *c.z_min, *c.z_max, static_cast<std::size_t>(*c.n_r),
                       static_cast<std::size_t>(*c.n_z));
}

RingProfile ring_of(const RunConfig& c) { return {c.r_c, c.z_c, c.rho_r, c.rho_z, c.amplitude}; }

KappaSearchSchedule schedule_of(const RunConfig& c) {
  KappaSearchSchedule s;
  s.max_points = static_cast<std::size_t>(c.kappa_max_points);
  return s;
}

IvseConfig ivse_config(const RunConfig& c) {
  IvseConfig ic;
  ic.ring = ring_of(c);
  ic.grid = grid_of(c);
  ic.rule_order = static_cast<std::size_t>(c.rule_order);
  ic.delta = c.delta;
  ic.stepper = c.stepper == "rk4" ? Stepper::rk4 : Stepper::exponential;
  ic.cfl = *c.cfl;
  ic.lower_tolerance = c.lower_tolerance;
  ic.sup_cap_factor = c.sup_cap_factor;
  ic.max_steps = static_cast<std::size_t>(c.max_steps);
  ic.kappa_safety = c.kappa_safety;
  ic.kappa_schedule = schedule_of(c);
  ic.support_threshold = c.support_threshold;
  return ic;
}

EulerConfig euler_config(const RunConfig& c) {
  EulerConfig ec;
  ec.ring = ring_of(c);
  ec.grid = grid_of(c);
  ec.rule_order = static_cast<std::size_t>(c.rule_order);
  ec.delta = c.delta;
  ec.cfl = *c.cfl;
  ec.horizon = c.horizon;
  ec.snapshot_interval = c.snapshot_interval;
  ec.kappa_threshold = c.kappa_threshold;
  ec.max_steps = static_cast<std::size_t>(c.max_steps);
  return ec;
}

Check check(std::string name, double value, double limit) {
  return {std::move(name), value, limit, std::isfinite(value) && value <= limit};
}

json blowup_json(const BlowupReport& r) {
  return {{"times", series(r.times)},
          {"Q_values", series(r.Q_values)},
          {"kappa", num(r.kappa)},
          {"kappa_conservative", num(r.kappa_conservative)},
          {"Q0", num(r.Q0)},
          {"predicted_T_upper", num(r.predicted_T_upper)},
          {"predicted_T_upper_conservative", num(r.predicted_T_upper_conservative)},
          {"lower_curve_violations", r.lower_curve_violations},
          {"observed_blowup_time_estimate", r.observed_blowup_time_estimate ? num(*r.observed_blowup_time_estimate) : json()},
          {"dt_history", series(r.dt_history)},
          {"sup_norm_history", series(r.sup_norm_history)},
          {"reached_cap", r.reached_cap},
          {"Q_strictly_increasing", r.Q_strictly_increasing},
          {"sign_violations", r.sign_violations},
          {"support_changes_thresholded", r.support_changes},
          {"support_changes_exact", r.exact_support_changes},
          {"stop_reason", r.stop_reason}};
}

std::vector<Check> blowup_checks(const BlowupReport& r) {
  std::vector<Check> out;
  out.push_back(check("lower-curve violations", static_cast<double>(r.lower_curve_violations), 0.0));
  out.push_back(check("Q not strictly increasing (1 = yes)", r.Q_strictly_increasing ? 0.0 : 1.0, 0.0));
  out.push_back(check("sign violations", static_cast<double>(r.sign_violations), 0.0));
  out.push_back(check("nonzero-set changes", static_cast<double>(r.exact_support_changes), 0.0));
  if (r.Q0 > 0.0) {
    out.push_back(check("sup-norm cap not reached (1 = yes)", r.reached_cap ? 0.0 : 1.0, 0.0));
    out.push_back(check("observed blowup time - 1/(0.9 kappa Q0)",
                        r.observed_blowup_time_estimate
                            ? *r.observed_blowup_time_estimate - r.predicted_T_upper_conservative
                            : std::numeric_limits<double>::infinity(),
                        0.0));
  }
  return out;
}

// kappa(t) <= (1 + wiggle) * min over earlier samples
double kappa_trend_excess(const AnisoReport& r) {
  double worst = 0.0, running = std::numeric_limits<double>::infinity();
  for (const auto& s : r.snapshots) {
    if (s.kappa <= 0.0) continue;
    if (std::isfinite(running)) worst = std::max(worst, s.kappa / running - 1.0);
    running = std::min(running, s.kappa);
  }
  return worst;
}

std::vector<Check> aniso_checks(const AnisoReport& r, const RunConfig& c) {
  std::vector<Check> out;
  if (r.snapshots.empty() || r.Q0 == 0.0) return out;
  const double e0 = r.snapshots.front().energy;
  double drift = 0.0, circ = 0.0;
  const double c0 = r.snapshots.front().circulation;
  for (const auto& s : r.snapshots) {
    drift = std::max(drift, std::abs(s.energy - e0) / std::abs(e0));
    circ = std::max(circ, std::abs(s.circulation - c0) / std::abs(c0));
  }
  out.push_back(check("energy drift", drift, c.energy_tolerance));
  out.push_back(check("kappa integral / bound", r.kappa_integral / r.bound, 1.0 + c.kappa_integral_tolerance));
  out.push_back(check("kappa rise over running minimum", kappa_trend_excess(r), c.kappa_wiggle));
  out.push_back(check("circulation drift", circ, c.circulation_tolerance));
  out.push_back(check("sign violations", static_cast<double>(r.sign_violations), 0.0));
  return out;
}

json aniso_json(const AnisoReport& r) {
  json snaps = json::array();
  for (const auto& s : r.snapshots)
    snaps.push_back({{"t", num(s.t)},
                     {"Q", num(s.Q)},
                     {"kappa", num(s.kappa)},
                     {"kappa_integral", num(s.kappa_integral)},
                     {"energy", num(s.energy)},
                     {"circulation", num(s.circulation)},
                     {"support_box", {num(s.box.r_lo), num(s.box.r_hi), num(s.box.z_lo), num(s.box.z_hi)}},
                     {"aspect_ratio", num(s.aspect)}});
  return {{"times", series(r.times)},
          {"Q_values", series(r.Q_values)},
          {"Q0", num(r.Q0)},
          {"bound", num(r.bound)},
          {"kappa_integral", num(r.kappa_integral)},
          {"snapshots", snaps},
          {"sign_violations", r.sign_violations},
          {"rejected_steps", r.rejected_steps},
          {"stop_reason", r.stop_reason}};
}

struct Outcome {
  json report;
  std::vector<Check> checks;
};

Outcome run_simulate(const RunConfig& c, const fs::path& dir) {
  IvseConfig ic = ivse_config(c);
  Csv csv(dir / "steps.csv", {"step", "t", "Q", "sup_norm", "dt", "lower_curve", "violation"});
  const std::size_t every = static_cast<std::size_t>(c.snapshot_every);
  if (every > 0) fs::create_directories(dir / "snapshots");
  ic.observer = [&](const StepRecord& r, const AxiScalarField& w) {
    csv.row({std::to_string(r.step), fmt(r.t), fmt(r.Q), fmt(r.sup_norm), fmt(r.dt), fmt(r.lower_curve),
             r.violation ? "1" : "0"});
    if (every > 0 && r.step % every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%06zu", r.step);
      write_snapshot(dir / "snapshots" / name, w, {{"t", r.t}, {"step", r.step}});
    }
  };
  const BlowupReport rep = run_ivse(ic);
  return {blowup_json(rep), blowup_checks(rep)};
}

Outcome run_euler_mode(const RunConfig& c, const fs::path& dir) {
  EulerConfig ec = euler_config(c);
  std::vector<std::vector<std::string>> rows;
  ec.observer = [&](const StepRecord& r, const AxiScalarField&) {
    rows.push_back({std::to_string(r.step), fmt(r.t), fmt(r.Q), fmt(r.sup_norm), fmt(r.dt), "", "0", "", "", ""});
  };
  const AnisoReport rep = run_euler(ec);
  // diagnostics land on the rows whose time matches a snapshot
  std::size_t s = 0;
  for (auto& row : rows) {
    if (s < rep.snapshots.size() && fmt(rep.snapshots[s].t) == row[1]) {
      row[7] = fmt(rep.snapshots[s].kappa);
      row[8] = fmt(rep.snapshots[s].energy);
      row[9] = fmt(rep.snapshots[s].aspect);
      ++s;
    }
  }
  Csv csv(dir / "steps.csv",
          {"step", "t", "Q", "sup_norm", "dt", "lower_curve", "violation", "kappa", "energy", "aspect_ratio"});
  for (const auto& row : rows) csv.row(row);
  return {aniso_json(rep), aniso_checks(rep, c)};
}

Outcome run_compare(const RunConfig& c, const fs::path& dir) {
  const ComparisonReport rep = compare_ivse_vs_euler(euler_config(c), ivse_config(c));
  Csv csv(dir / "compare.csv", {"t", "Q_euler", "Q_ivse"});
  for (std::size_t n = 0; n < rep.euler.times.size(); ++n) {
    const auto qi = interpolate_Q(rep.ivse.times, rep.ivse.Q_values, rep.euler.times[n]);
    csv.row({fmt(rep.euler.times[n]), fmt(rep.euler.Q_values[n]), qi ? fmt(*qi) : ""});
  }
  json aspect = json::array();
  for (const auto& s : rep.euler.snapshots) aspect.push_back({num(s.t), num(s.aspect), num(s.kappa)});
  Outcome out;
  out.report = {{"dQdt_ivse", num(rep.dQdt_ivse)},
                {"dQdt_euler", num(rep.dQdt_euler)},
                {"ratio", num(rep.ratio)},
                {"depletion_from", rep.depletion_from ? num(*rep.depletion_from) : json()},
                {"euler_below_ivse_from_t1", rep.euler_below_from_t1},
                {"aspect_ratio_kappa", aspect},
                {"ivse", blowup_json(rep.ivse)},
                {"euler", aniso_json(rep.euler)}};
  out.checks.push_back(check("|ratio / 2 - 1|", std::abs(rep.ratio / 2.0 - 1.0), c.ratio_tolerance));
  out.checks.push_back(check("Euler Q not below IVSE Q from t = 1 (1 = yes)", rep.euler_below_from_t1 ? 0.0 : 1.0, 0.0));
  return out;
}

Outcome run_kappa(const RunConfig& c) {
  const AxiScalarField w = make_vortex_ring_pair(ring_of(c), grid_of(c));
  const PhiQuadRule rule = PhiQuadRule::gauss_legendre(static_cast<std::size_t>(c.rule_order));
  const KappaEstimate k = estimate_kappa(support_region(w, c.support_threshold), rule, schedule_of(c));
  json hist = json::array();
  for (const auto& h : k.history) hist.push_back({{"stride", h.stride}, {"points", h.points}, {"value", num(h.value)}});
  const double Q0 = functional_Q(w);
  return {{{"kappa", num(k.value)},
           {"kappa_conservative", num(k.conservative(c.kappa_safety))},
           {"argmin_a", {num(k.argmin_a[0]), num(k.argmin_a[1])}},
           {"argmin_b", {num(k.argmin_b[0]), num(k.argmin_b[1])}},
           {"n_r", k.n_r},
           {"n_z", k.n_z},
           {"history", hist},
           {"Q0", num(Q0)},
           {"predicted_T_upper", num(1.0 / (k.value * Q0))}},
          {}};
}

Outcome run_oracle(const RunConfig& c) {
  OracleSuiteConfig oc;
  oc.n = static_cast<std::size_t>(c.spectral_n);
  oc.seed = c.seed;
  oc.fields = static_cast<std::size_t>(c.random_pairs);
  oc.s = c.hs_s;
  oc.tolerance = c.identity_tolerance;
  oc.picard_substeps = static_cast<std::size_t>(c.picard_substeps);
  oc.picard_max_iter = static_cast<std::size_t>(c.picard_max_iter);
  oc.picard_tol = c.picard_tol;
  oc.ring_box = c.box_length;
  oc.ring_n = static_cast<std::size_t>(c.spectral_n);
  Outcome out;
  out.checks = run_oracle_suite(oc);
  out.report = {{"fourier_convention",
                 "v(x) = sum_m c_m exp(2 pi i m.x/L), xi = m/L, ||v||_{H^s}^2 = L^3 sum (1 + 4 pi^2 |xi|^2)^s |c_m|^2"},
                {"n", oc.n},
                {"identity_box_length", oc.length},
                {"ring_box_length", oc.ring_box}};
  return out;
}

Outcome run_verify(const RunConfig& c) {
  const AxiGrid g = grid_of(c);
  const AxiScalarField w = make_vortex_ring_pair(ring_of(c), g);
  const PhiQuadRule rule = PhiQuadRule::gauss_legendre(static_cast<std::size_t>(c.rule_order));
  const IvseSystem system(g, rule, c.delta);
  std::optional<double> kappa;
  if (w.max_abs() > 0.0) kappa = estimate_kappa(support_region(w, c.support_threshold), rule, schedule_of(c)).value;
  const DqdtReport d = verify_dQdt(w, system, kappa);
  // at a hundredth of the growth timescale the O(h^2) error sits well below the spatial one
  double rate = 0.0;
  for (double v : system.growth_rate(w).values) rate = std::max(rate, std::abs(v));
  const double h = rate > 0.0 ? 0.01 / rate : 1.0;
  const double fd = finite_difference_dQdt(w, system, h);
  const double scale = std::max(std::abs(fd), std::abs(d.rhs));
  const double fd_res = scale > 0.0 ? std::abs(fd - d.rhs) / scale : 0.0;
  // sensitivity of the regularized quantities to the blob radius
  const double delta0 = c.delta < 0.0 ? default_delta(g) : c.delta;
  json sensitivity = json::array();
  double lo = INFINITY, hi = -INFINITY;
  for (double factor : {0.5, 1.0, 2.0}) {
    const BiotSavartOperator op(g, rule, factor * delta0);
    const AxiScalarField ur = op.radial_velocity(w);
    std::vector<double> terms(g.size());
    double ur_max = 0.0;
    for (std::size_t i = 0; i < g.n_r; ++i)
      for (std::size_t j = 0; j < g.n_z; ++j) {
        terms[g.index(i, j)] = -g.r(i) * ur.at(i, j) * w.at(i, j);
        ur_max = std::max(ur_max, std::abs(ur.at(i, j)));
      }
    const double lhs = pairwise_sum(terms) * g.cell_area();
    lo = std::min(lo, lhs);
    hi = std::max(hi, lhs);
    sensitivity.push_back({{"delta", num(factor * delta0)}, {"dQdt_direct", num(lhs)}, {"max_abs_u_r", num(ur_max)}});
  }
  Outcome out;
  out.report = {{"lhs", num(d.lhs)}, {"rhs", num(d.rhs)}, {"residual", num(d.residual)},
                {"delta_sensitivity", sensitivity},
                {"delta_spread", num(hi > 0.0 ? (hi - lo) / hi : 0.0)},
                {"finite_difference", num(fd)}, {"finite_difference_step", num(h)},
                {"finite_difference_residual", num(fd_res)},
                {"kappa_Q2", d.kappa_Q2 ? num(*d.kappa_Q2) : json()}};
  out.checks.push_back(check("|lhs - rhs| / max", d.residual, c.dqdt_tolerance));
  out.checks.push_back(check("|finite difference - rhs| / max", fd_res, c.dqdt_tolerance));
  if (d.kappa_Q2) out.checks.push_back(check("kappa Q^2 (1 - tol) - rhs", *d.kappa_Q2 * (1.0 - c.dqdt_tolerance) - d.rhs, 0.0));
  return out;
}

json manifest(const RunConfig* c, int exit_code, double seconds, const std::string& status) {
  json m = {{"version", version()},
            {"threads", worker_threads()},
            {"wall_clock_seconds", seconds},
            {"exit_code", exit_code},
            {"status", status}};
  if (c) {
    m["mode"] = to_string(c->mode);
    m["config_hash"] = config_hash(*c);
    m["config"] = c->to_json();
  }
  return m;
}

}  // namespace

void write_failure_artifacts(const fs::path& dir, const std::string& kind, const std::string& message, int exit_code) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const json err = {{"error", kind}, {"message", message}, {"exit_code", exit_code}};
  try {
    write_json(dir / "error.json", err);
    write_json(dir / "manifest.json", manifest(nullptr, exit_code, 0.0, "error"));
  } catch (const std::exception&) {
  }
}

int run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(config.output_dir);
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  int code = kExitOk;
  std::string status = "ok";
  try {
    fs::create_directories(dir);
    Outcome out;
    switch (config.mode) {
      case Mode::simulate: out = run_simulate(config, dir); break;
      case Mode::euler: out = run_euler_mode(config, dir); break;
      case Mode::compare: out = run_compare(config, dir); break;
      case Mode::kappa: out = run_kappa(config); break;
      case Mode::oracle: out = run_oracle(config); break;
      case Mode::verify: out = run_verify(config); break;
    }
    const bool pass = all_pass(out.checks);
    out.report["checks"] = to_json(out.checks);
    out.report["pass"] = pass;
    write_json(dir / (config.mode == Mode::oracle ? "oracle.json" : "report.json"), out.report);
    if (!pass) {
      code = kExitChecksFailed;
      status = "checks_failed";
    }
  } catch (const ConfigError& e) {
    code = kExitInvalidConfig;
    status = "error";
    write_failure_artifacts(dir, "ConfigError", e.what(), code);
  } catch (const std::exception& e) {
    code = kExitRuntimeError;
    status = "error";
    write_failure_artifacts(dir, "RuntimeError", e.what(), code);
  }
  try {
    write_json(dir / "manifest.json", manifest(&config, code, elapsed(), status));
  } catch (const std::exception&) {
    if (code == kExitOk) code = kExitRuntimeError;
  }
  return code;
}

}  // namespace ivse
