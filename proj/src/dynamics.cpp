#include "ivse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ivse {

namespace {

std::vector<std::size_t> nonzero_cells(const AxiScalarField& f) {
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < f.values.size(); ++c)
    if (f.values[c] != 0.0) cells.push_back(c);
  return cells;
}

void require_finite(const AxiScalarField& f, std::size_t step) {
  if (!f.all_finite()) throw NumericalError("non-finite vorticity at step " + std::to_string(step));
}

AxiScalarField axpy(const AxiScalarField& x, double a, const AxiScalarField& y) {
  AxiScalarField out(x.grid);
  for (std::size_t c = 0; c < x.values.size(); ++c) out.values[c] = x.values[c] + a * y.values[c];
  return out;
}

AxiScalarField rk4_any(const AxiScalarField& w, double dt, const IvseSystem& system) {
  const AxiScalarField k1 = system.rhs(w);
  const AxiScalarField k2 = system.rhs(axpy(w, 0.5 * dt, k1));
  const AxiScalarField k3 = system.rhs(axpy(w, 0.5 * dt, k2));
  const AxiScalarField k4 = system.rhs(axpy(w, dt, k3));
  AxiScalarField out(w.grid);
  for (std::size_t c = 0; c < w.values.size(); ++c)
    out.values[c] = w.values[c] + dt / 6.0 * (k1.values[c] + 2.0 * k2.values[c] + 2.0 * k3.values[c] + k4.values[c]);
  return out;
}

AxiScalarField apply_growth(const AxiScalarField& w, const AxiScalarField& rate, double dt) {
  AxiScalarField out(w.grid);
  const double log_max = std::log(std::numeric_limits<double>::max());
  for (std::size_t c = 0; c < w.values.size(); ++c) {
    const double v = w.values[c];
    if (v == 0.0) continue;
    const double arg = dt * rate.values[c];
    if (arg + std::log(std::abs(v)) >= log_max) throw BlowupImminent("exponential step overflows");
    out.values[c] = v * std::exp(arg);
  }
  return out;
}

}  // namespace

IvseSystem::IvseSystem(const AxiGrid& grid, const PhiQuadRule& rule, double delta) : op_(grid, rule, delta) {}

AxiScalarField IvseSystem::growth_rate(const AxiScalarField& omega) const {
  if (!(omega.grid == op_.grid())) throw ConfigError("IvseSystem: field grid differs from the operator grid");
  AxiScalarField rate(omega.grid);
  const auto cells = nonzero_cells(omega);
  if (cells.empty()) return rate;
  std::vector<double> u(cells.size());
  op_.radial_velocity(omega, cells, u);
  for (std::size_t n = 0; n < cells.size(); ++n) rate.values[cells[n]] = u[n] / omega.grid.r(cells[n] / omega.grid.n_z);
  return rate;
}

AxiScalarField IvseSystem::rhs(const AxiScalarField& omega) const {
  AxiScalarField out = growth_rate(omega);
  for (std::size_t c = 0; c < out.values.size(); ++c) out.values[c] *= omega.values[c];
  return out;
}

AxiScalarField ivse_rhs(const AxiScalarField& field, const PhiQuadRule& rule, double delta) {
  return IvseSystem(field.grid, rule, delta).rhs(field);
}

AxiScalarField step_exponential(const AxiScalarField& field, double dt, const IvseSystem& system) {
  if (!(dt >= 0.0)) throw ConfigError("step_exponential: dt must be nonnegative");
  if (dt == 0.0) return field;
  return apply_growth(field, system.growth_rate(field), dt);
}

AxiScalarField step_rk4(const AxiScalarField& field, double dt, const IvseSystem& system) {
  if (!(dt >= 0.0)) throw ConfigError("step_rk4: dt must be nonnegative");
  if (dt == 0.0) return field;
  return rk4_any(field, dt, system);
}

std::optional<double> extrapolate_blowup_time(const std::vector<double>& times, const std::vector<double>& sup_norms) {
  if (times.size() != sup_norms.size() || times.empty()) return std::nullopt;
  const double cut = sup_norms.back() / 10.0;
  std::vector<double> t, y;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (sup_norms[n] >= cut && sup_norms[n] > 0.0) {
      t.push_back(times[n]);
      y.push_back(1.0 / sup_norms[n]);
    }
  }
  if (t.size() < 3) return std::nullopt;
  const double m = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    st += t[n];
    sy += y[n];
  }
  const double tb = st / m, yb = sy / m;
  double stt = 0, sty = 0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    stt += (t[n] - tb) * (t[n] - tb);
    sty += (t[n] - tb) * (y[n] - yb);
  }
  if (stt <= 0.0) return std::nullopt;
  const double slope = sty / stt;
  if (!(slope < 0.0)) return std::nullopt;
  return tb - yb / slope;
}

BlowupReport run_ivse(const IvseConfig& config) {
  return run_ivse(make_vortex_ring_pair(config.ring, config.grid), config);
}

BlowupReport run_ivse(const AxiScalarField& initial, const IvseConfig& config) {
  if (!(config.cfl > 0.0)) throw ConfigError("run_ivse: cfl must be positive");
  if (!(config.sup_cap_factor > 1.0)) throw ConfigError("run_ivse: sup_cap_factor must exceed 1");
  if (!(config.lower_tolerance >= 0.0)) throw ConfigError("run_ivse: lower_tolerance must be nonnegative");
  const GeometryReport geo0 = validate_geometry(initial);
  if (!geo0.ok()) throw ConfigError("run_ivse: initial field is not geometry-valid");

  const PhiQuadRule rule = PhiQuadRule::gauss_legendre(config.rule_order);
  BlowupReport rep;
  rep.Q0 = functional_Q(initial);
  const double sup0 = initial.max_abs();

  std::optional<SupportRegion> support0;
  if (sup0 > 0.0) {
    if (initial.max_abs() > config.support_threshold) support0 = support_region(initial, config.support_threshold);
    if (config.kappa) {
      rep.kappa = *config.kappa;
    } else if (support0) {
      rep.kappa = estimate_kappa(*support0, rule, config.kappa_schedule).value;
    }
  }
  rep.kappa_conservative = config.kappa_safety * rep.kappa;
  const double kq = rep.kappa * rep.Q0;
  rep.predicted_T_upper = kq > 0.0 ? 1.0 / kq : std::numeric_limits<double>::infinity();
  rep.predicted_T_upper_conservative =
      rep.kappa_conservative * rep.Q0 > 0.0 ? 1.0 / (rep.kappa_conservative * rep.Q0) : rep.predicted_T_upper;

  const auto lower_curve = [&](double t) {
    const double d = 1.0 - kq * t;
    return d > 0.0 ? rep.Q0 / d : std::numeric_limits<double>::infinity();
  };
  const std::vector<char> nonzero0 = [&] {
    std::vector<char> m(initial.values.size());
    for (std::size_t c = 0; c < m.size(); ++c) m[c] = initial.values[c] != 0.0;
    return m;
  }();
  const std::vector<char> mask0 = support0 ? support0->mask() : std::vector<char>(initial.values.size(), 0);

  AxiScalarField w = initial;
  double t = 0.0;
  const auto record = [&](std::size_t step, double dt) {
    StepRecord r;
    r.step = step;
    r.t = t;
    r.Q = functional_Q(w);
    r.sup_norm = w.max_abs();
    r.dt = dt;
    r.lower_curve = lower_curve(t);
    r.violation = r.Q < r.lower_curve * (1.0 - config.lower_tolerance);
    if (r.violation) ++rep.lower_curve_violations;
    if (!rep.Q_values.empty() && !(r.Q > rep.Q_values.back())) rep.Q_strictly_increasing = false;
    rep.times.push_back(t);
    rep.Q_values.push_back(r.Q);
    rep.sup_norm_history.push_back(r.sup_norm);
    if (step > 0) rep.dt_history.push_back(dt);

    std::size_t positive = 0, exact = 0, thresholded = 0;
    for (std::size_t c = 0; c < w.values.size(); ++c) {
      const double v = w.values[c];
      if (v > 0.0) ++positive;
      if ((v != 0.0) != static_cast<bool>(nonzero0[c])) ++exact;
      if ((std::abs(v) > config.support_threshold) != static_cast<bool>(mask0[c])) ++thresholded;
    }
    rep.sign_violations += positive;
    rep.exact_support_changes = std::max(rep.exact_support_changes, exact);
    rep.support_changes = std::max(rep.support_changes, thresholded);
    if (config.observer) config.observer(r, w);
  };
  record(0, 0.0);
  if (sup0 == 0.0) {
    rep.stop_reason = "zero data";
    return rep;
  }

  const IvseSystem system(initial.grid, rule, config.delta);
  const double cap = config.sup_cap_factor * sup0;
  rep.stop_reason = "max_steps";
  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    const AxiScalarField rate = system.growth_rate(w);
    double rmax = 0.0;
    for (double v : rate.values) rmax = std::max(rmax, std::abs(v));
    double dt = config.cfl / std::max(rmax, config.rate_floor);
    if (t + dt > config.max_time) dt = config.max_time - t;
    if (!(dt > 0.0)) {
      rep.stop_reason = "max_time";
      break;
    }
    try {
      if (config.stepper == Stepper::exponential) {
        w = apply_growth(w, rate, dt);
      } else {
        w = step_rk4(w, dt, system);
      }
    } catch (const BlowupImminent&) {
      rep.stop_reason = "overflow";
      break;
    }
    require_finite(w, step);
    t += dt;
    record(step, dt);
    if (rep.sup_norm_history.back() >= cap) {
      rep.reached_cap = true;
      rep.stop_reason = "sup_cap";
      break;
    }
    if (t >= config.max_time) {
      rep.stop_reason = "max_time";
      break;
    }
  }
  if (rep.reached_cap) rep.observed_blowup_time_estimate = extrapolate_blowup_time(rep.times, rep.sup_norm_history);
  return rep;
}

DqdtReport verify_dQdt(const AxiScalarField& field, const IvseSystem& system, std::optional<double> kappa) {
  DqdtReport rep;
  const AxiGrid& g = field.grid;
  const double area = g.cell_area();
  const auto cells = nonzero_cells(field);
  if (cells.empty()) {
    if (kappa) rep.kappa_Q2 = 0.0;
    return rep;
  }

  // left side: -sum r u_r omega
  {
    std::vector<double> u(cells.size());
    system.biot_savart().radial_velocity(field, cells, u);
    std::vector<double> terms(cells.size());
    for (std::size_t n = 0; n < cells.size(); ++n)
      terms[n] = -g.r(cells[n] / g.n_z) * u[n] * field.values[cells[n]] * area;
    rep.lhs = pairwise_sum(terms);
  }

  // right side: (1/2pi) sum_a sum_b r_a omega_a omega_b rh(r_a, r_b, z_a + z_b), no regularization.
  // The (z - zbar) contributions cancel by antisymmetry and are omitted.
  {
    std::vector<std::size_t> cols, lo, hi;
    for (std::size_t i = 0; i < g.n_r; ++i) {
      std::size_t first = g.n_z, last = 0;
      for (std::size_t j = 0; j < g.n_z; ++j)
        if (field.at(i, j) != 0.0) {
          first = std::min(first, j);
          last = j;
        }
      if (first < g.n_z) {
        cols.push_back(i);
        lo.push_back(first);
        hi.push_back(last);
      }
    }
    const PhiQuadRule& rule = system.biot_savart().rule();
    const auto nc = static_cast<long>(cols.size());
    std::vector<double> partial(cols.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (long a = 0; a < nc; ++a) {
      const std::size_t i = cols[static_cast<std::size_t>(a)];
      const double r = g.r(i);
      std::vector<double> per_source;
      std::vector<double> table;
      for (std::size_t b = 0; b < cols.size(); ++b) {
        const std::size_t k = cols[b];
        const std::size_t p0 = lo[static_cast<std::size_t>(a)] + lo[b];
        const std::size_t p1 = hi[static_cast<std::size_t>(a)] + hi[b];
        table.assign(p1 - p0 + 1, 0.0);
        for (std::size_t p = p0; p <= p1; ++p)
          table[p - p0] = radial_half_kernel(r, g.r(k), 2.0 * g.z_min + (static_cast<double>(p) + 1.0) * g.dz(), rule);
        double acc = 0.0;
        for (std::size_t j = lo[static_cast<std::size_t>(a)]; j <= hi[static_cast<std::size_t>(a)]; ++j) {
          const double wa = field.at(i, j);
          if (wa == 0.0) continue;
          double inner = 0.0;
          for (std::size_t l = lo[b]; l <= hi[b]; ++l) inner += field.at(k, l) * table[j + l - p0];
          acc += wa * inner;
        }
        per_source.push_back(r * acc);
      }
      partial[static_cast<std::size_t>(a)] = pairwise_sum(per_source);
    }
    rep.rhs = pairwise_sum(partial) * area * area / (2.0 * kPi);
  }

  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.residual = scale > 0.0 ? std::abs(rep.lhs - rep.rhs) / scale : 0.0;
  if (kappa) {
    const double Q = functional_Q(field);
    rep.kappa_Q2 = *kappa * Q * Q;
  }
  return rep;
}

double finite_difference_dQdt(const AxiScalarField& field, const IvseSystem& system, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_difference_dQdt: step must be positive");
  const double qp = functional_Q(rk4_any(field, h, system));
  const double qm = functional_Q(rk4_any(field, -h, system));
  return (qp - qm) / (2.0 * h);
}

}  // namespace ivse
