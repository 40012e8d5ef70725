#include "ivse/euler.hpp"

#include <algorithm>
#include <cmath>

namespace ivse {

namespace {

double van_leer(double a, double b) {
  const double p = a * b;
  return p > 0.0 ? 2.0 * p / (a + b) : 0.0;
}

// Vorticity including the boundary continuation: odd below z = 0 when the grid
// starts at the plane, zero past every other edge (and past the axis, where no
// flux is taken anyway).
struct Extended {
  const AxiScalarField& f;
  bool odd_bottom;

  double operator()(long i, long j) const {
    const auto nr = static_cast<long>(f.grid.n_r);
    const auto nz = static_cast<long>(f.grid.n_z);
    if (i < 0 || i >= nr || j >= nz) return 0.0;
    if (j < 0) return odd_bottom ? -f.at(static_cast<std::size_t>(i), static_cast<std::size_t>(-1 - j)) : 0.0;
    return f.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
};

// Upwind MUSCL face value between cells (m) and (m + 1) along a line.
double face_value(double wmm, double wm, double wp, double wpp, double a) {
  if (a > 0.0) return wm + 0.5 * van_leer(wm - wmm, wp - wm);
  return wp - 0.5 * van_leer(wp - wm, wpp - wp);
}

std::vector<std::size_t> with_halo(const AxiScalarField& w, std::size_t halo) {
  const AxiGrid& g = w.grid;
  std::vector<char> mark(g.size(), 0);
  const auto h = static_cast<long>(halo);
  for (std::size_t i = 0; i < g.n_r; ++i)
    for (std::size_t j = 0; j < g.n_z; ++j) {
      if (w.at(i, j) == 0.0) continue;
      for (long di = -h; di <= h; ++di)
        for (long dj = -h; dj <= h; ++dj) {
          const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(g.n_r) || jj >= static_cast<long>(g.n_z)) continue;
          mark[g.index(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj))] = 1;
        }
    }
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < mark.size(); ++c)
    if (mark[c]) cells.push_back(c);
  return cells;
}

AxiScalarField combine(double a, const AxiScalarField& x, double b, const AxiScalarField& y, double c,
                       const AxiScalarField& z) {
  AxiScalarField out(x.grid);
  for (std::size_t n = 0; n < x.values.size(); ++n) out.values[n] = a * x.values[n] + b * y.values[n] + c * z.values[n];
  return out;
}

AxiScalarField ssprk3(const AxiScalarField& w, double dt, const std::function<AxiScalarField(const AxiScalarField&)>& L) {
  const AxiScalarField l0 = L(w);
  const AxiScalarField w1 = combine(1.0, w, dt, l0, 0.0, l0);
  const AxiScalarField l1 = L(w1);
  const AxiScalarField w2 = combine(0.75, w, 0.25, w1, 0.25 * dt, l1);
  const AxiScalarField l2 = L(w2);
  return combine(1.0 / 3.0, w, 2.0 / 3.0, w2, 2.0 / 3.0 * dt, l2);
}

}  // namespace

AxiScalarField euler_rhs(const AxiScalarField& field, const AxiVelocity& velocity) {
  const AxiGrid& g = field.grid;
  if (!(velocity.grid == g)) throw ConfigError("euler_rhs: velocity grid differs from field grid");
  const bool odd_bottom = g.z_min == 0.0;
  const bool axis = g.r_min == 0.0;
  const Extended w{field, odd_bottom};
  const auto nr = static_cast<long>(g.n_r);
  const auto nz = static_cast<long>(g.n_z);
  const auto ur = [&](long i, long j) { return velocity.u_r[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))]; };
  const auto uz = [&](long i, long j) { return velocity.u_z[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))]; };

  // radial faces i + 1/2 for i = -1 .. nr - 1, stored at index i + 1
  std::vector<double> fr(static_cast<std::size_t>((nr + 1) * nz), 0.0);
  // vertical faces j + 1/2 for j = -1 .. nz - 1
  std::vector<double> fz(static_cast<std::size_t>(nr * (nz + 1)), 0.0);

#pragma omp parallel for schedule(static)
  for (long i = -1; i < nr; ++i) {
    for (long j = 0; j < nz; ++j) {
      double a;
      if (i == -1) {
        if (axis) continue;
        a = ur(0, j);  // inflow through r_min carries zero vorticity
      } else if (i == nr - 1) {
        a = ur(nr - 1, j);
      } else {
        a = 0.5 * (ur(i, j) + ur(i + 1, j));
      }
      const double v = face_value(w(i - 1, j), w(i, j), w(i + 1, j), w(i + 2, j), a);
      fr[static_cast<std::size_t>((i + 1) * nz + j)] = a * v;
    }
  }
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nr; ++i) {
    for (long j = -1; j < nz; ++j) {
      double a;
      if (j == -1) {
        if (odd_bottom) continue;  // u_z is odd, so it vanishes on the plane
        a = uz(i, 0);
      } else if (j == nz - 1) {
        a = uz(i, nz - 1);
      } else {
        a = 0.5 * (uz(i, j) + uz(i, j + 1));
      }
      const double v = face_value(w(i, j - 1), w(i, j), w(i, j + 1), w(i, j + 2), a);
      fz[static_cast<std::size_t>(i * (nz + 1) + j + 1)] = a * v;
    }
  }

  AxiScalarField out(g);
  const double idr = 1.0 / g.dr(), idz = 1.0 / g.dz();
  for (long i = 0; i < nr; ++i)
    for (long j = 0; j < nz; ++j) {
      const double dfr = fr[static_cast<std::size_t>((i + 1) * nz + j)] - fr[static_cast<std::size_t>(i * nz + j)];
      const double dfz = fz[static_cast<std::size_t>(i * (nz + 1) + j + 1)] - fz[static_cast<std::size_t>(i * (nz + 1) + j)];
      out.values[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))] = -(dfr * idr + dfz * idz);
    }
  return out;
}

double cfl_rate(const AxiVelocity& velocity) {
  const double idr = 1.0 / velocity.grid.dr(), idz = 1.0 / velocity.grid.dz();
  double m = 0.0;
  for (std::size_t c = 0; c < velocity.u_r.size(); ++c)
    m = std::max(m, std::abs(velocity.u_r[c]) * idr + std::abs(velocity.u_z[c]) * idz);
  return m;
}

EulerSystem::EulerSystem(const AxiGrid& grid, const PhiQuadRule& rule, double delta, std::size_t halo)
    : op_(grid, rule, delta), halo_(halo) {}

AxiVelocity EulerSystem::near_velocity(const AxiScalarField& omega) const {
  AxiVelocity v(omega.grid);
  const auto cells = with_halo(omega, halo_);
  if (cells.empty()) return v;
  std::vector<double> ur(cells.size()), uz(cells.size());
  op_.radial_velocity(omega, cells, ur);
  op_.vertical_velocity(omega, cells, uz);
  for (std::size_t n = 0; n < cells.size(); ++n) {
    v.u_r[cells[n]] = ur[n];
    v.u_z[cells[n]] = uz[n];
  }
  return v;
}

AxiVelocity EulerSystem::full_velocity(const AxiScalarField& omega) const { return op_.velocity(omega); }

AxiScalarField EulerSystem::rhs(const AxiScalarField& omega) const { return euler_rhs(omega, near_velocity(omega)); }

EulerStep step_ssprk3(const AxiScalarField& field, double dt, const EulerSystem& system, double reject_cfl) {
  if (!(dt > 0.0)) throw ConfigError("step_ssprk3: dt must be positive");
  EulerStep out;
  for (;;) {
    bool rejected = false;
    const auto L = [&](const AxiScalarField& w) {
      const AxiVelocity u = system.near_velocity(w);
      if (cfl_rate(u) * dt > reject_cfl) rejected = true;
      return euler_rhs(w, u);
    };
    AxiScalarField next = ssprk3(field, dt, L);
    if (!rejected) {
      out.field = std::move(next);
      out.dt = dt;
      return out;
    }
    if (++out.rejections > 30) throw NumericalError("step_ssprk3: step size collapsed");
    dt *= 0.5;
  }
}

AxiScalarField step_transport(const AxiScalarField& field, const AxiVelocity& velocity, double dt) {
  return ssprk3(field, dt, [&](const AxiScalarField& w) { return euler_rhs(w, velocity); });
}

double euler_dQdt(const AxiScalarField& field, const EulerSystem& system) {
  const AxiScalarField rhs = system.rhs(field);
  const AxiGrid& g = field.grid;
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.n_r; ++i)
    for (std::size_t j = 0; j < g.n_z; ++j) terms[g.index(i, j)] = -g.r(i) * g.r(i) * rhs.at(i, j) * g.cell_area();
  return pairwise_sum(terms);
}

double kinetic_energy(const AxiVelocity& velocity) {
  const AxiGrid& g = velocity.grid;
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.n_r; ++i)
    for (std::size_t j = 0; j < g.n_z; ++j) {
      const std::size_t c = g.index(i, j);
      terms[c] = (velocity.u_r[c] * velocity.u_r[c] + velocity.u_z[c] * velocity.u_z[c]) * g.r(i);
    }
  return 2.0 * kPi * pairwise_sum(terms) * g.cell_area();
}

double circulation(const AxiScalarField& field) {
  return pairwise_sum(field.values) * field.grid.cell_area();
}

AnisoReport run_euler(const EulerConfig& config) { return run_euler(make_vortex_ring_pair(config.ring, config.grid), config); }

AnisoReport run_euler(const AxiScalarField& initial, const EulerConfig& config) {
  if (!(config.cfl > 0.0) || !(config.reject_cfl >= config.cfl)) throw ConfigError("run_euler: need 0 < cfl <= reject_cfl");
  if (!(config.horizon > 0.0)) throw ConfigError("run_euler: horizon must be positive");
  if (!(config.snapshot_interval > 0.0)) throw ConfigError("run_euler: snapshot_interval must be positive");
  if (!validate_geometry(initial).ok()) throw ConfigError("run_euler: initial field is not geometry-valid");

  const PhiQuadRule rule = PhiQuadRule::gauss_legendre(config.rule_order);
  const EulerSystem system(initial.grid, rule, config.delta);
  AnisoReport rep;
  rep.Q0 = functional_Q(initial);
  rep.bound = rep.Q0 > 0.0 ? 1.0 / (2.0 * rep.Q0) : std::numeric_limits<double>::infinity();

  AxiScalarField w = initial;
  double t = 0.0;
  const auto snapshot = [&] {
    EulerSnapshot s;
    s.t = t;
    s.Q = functional_Q(w);
    s.circulation = circulation(w);
    const double m = w.max_abs();
    if (m > 0.0) {
      const SupportRegion region = support_region(w, config.kappa_threshold * m);
      s.box = region.box;
      s.aspect = region.box.height() > 0.0 ? region.box.width() / region.box.height() : 0.0;
      s.kappa = estimate_kappa(region, rule, config.kappa_schedule).value;
      s.energy = kinetic_energy(system.full_velocity(w));
    }
    if (!rep.snapshots.empty()) {
      const EulerSnapshot& prev = rep.snapshots.back();
      s.kappa_integral = prev.kappa_integral + 0.5 * (s.t - prev.t) * (s.kappa + prev.kappa);
    }
    rep.kappa_integral = s.kappa_integral;
    rep.snapshots.push_back(s);
  };
  const auto record = [&](std::size_t step, double dt) {
    StepRecord r;
    r.step = step;
    r.t = t;
    r.Q = functional_Q(w);
    r.sup_norm = w.max_abs();
    r.dt = dt;
    rep.times.push_back(t);
    rep.Q_values.push_back(r.Q);
    rep.sup_norm_history.push_back(r.sup_norm);
    if (step > 0) rep.dt_history.push_back(dt);
    if (config.observer) config.observer(r, w);
  };

  record(0, 0.0);
  snapshot();
  if (w.max_abs() == 0.0) {
    rep.stop_reason = "zero data";
    return rep;
  }
  double next_snapshot = config.snapshot_interval;
  rep.stop_reason = "max_steps";
  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    const double rate = cfl_rate(system.near_velocity(w));
    double dt = rate > 0.0 ? config.cfl / rate : config.horizon - t;
    // land exactly on snapshot times and the horizon
    dt = std::min({dt, next_snapshot - t, config.horizon - t});
    EulerStep s = step_ssprk3(w, dt, system, config.reject_cfl);
    rep.rejected_steps += s.rejections;
    w = std::move(s.field);
    if (!w.all_finite()) throw NumericalError("run_euler: non-finite vorticity at step " + std::to_string(step));
    const double m = w.max_abs();
    // Roundoff-level values of either sign are flushed; anything of the wrong
    // sign above that level counts as a violation.
    for (double& v : w.values) {
      if (std::abs(v) < config.flush * m) {
        v = 0.0;
      } else if (v > 0.0) {
        ++rep.sign_violations;
      }
    }
    t += s.dt;
    record(step, s.dt);
    const bool at_end = config.horizon - t <= 1e-12 * config.horizon;
    if (next_snapshot - t <= 1e-12 * config.horizon || at_end) {
      snapshot();
      next_snapshot += config.snapshot_interval;
    }
    if (at_end) {
      rep.stop_reason = "horizon";
      break;
    }
  }
  return rep;
}

std::optional<double> interpolate_Q(const std::vector<double>& times, const std::vector<double>& Q, double t) {
  if (times.empty() || t < times.front() || t > times.back()) return std::nullopt;
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin());
  if (times[k] == t || k == 0) return Q[k];
  const double a = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - a) * Q[k - 1] + a * Q[k];
}

ComparisonReport compare_ivse_vs_euler(const EulerConfig& euler, IvseConfig ivse) {
  ComparisonReport rep;
  const AxiScalarField initial = make_vortex_ring_pair(euler.ring, euler.grid);
  const PhiQuadRule rule = PhiQuadRule::gauss_legendre(euler.rule_order);
  {
    const IvseSystem is(euler.grid, rule, euler.delta);
    const EulerSystem es(euler.grid, rule, euler.delta);
    rep.dQdt_ivse = verify_dQdt(initial, is).lhs;
    rep.dQdt_euler = euler_dQdt(initial, es);
    rep.ratio = rep.dQdt_euler / rep.dQdt_ivse;
  }
  ivse.ring = euler.ring;
  ivse.grid = euler.grid;
  ivse.rule_order = euler.rule_order;
  ivse.delta = euler.delta;
  ivse.max_time = euler.horizon;
  rep.ivse = run_ivse(initial, ivse);
  rep.euler = run_euler(initial, euler);

  // Euler Q against IVSE Q at each Euler step; past the end of a capped IVSE
  // run the IVSE value is unbounded and the comparison holds trivially.
  std::optional<double> from;
  for (std::size_t n = 0; n < rep.euler.times.size(); ++n) {
    const double t = rep.euler.times[n];
    const auto qi = interpolate_Q(rep.ivse.times, rep.ivse.Q_values, t);
    const bool below = qi ? rep.euler.Q_values[n] < *qi : rep.ivse.reached_cap;
    if (below) {
      if (!from) from = t;
    } else {
      from.reset();
    }
  }
  rep.depletion_from = from;
  rep.euler_below_from_t1 = from && *from <= 1.0;
  return rep;
}

}  // namespace ivse
