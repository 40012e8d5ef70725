#include <cmath>
#include <random>

#include "doctest.h"
#include "ivse/dynamics.hpp"

using namespace ivse;

namespace {
const PhiQuadRule& rule32() {
  static const PhiQuadRule r = PhiQuadRule::gauss_legendre(32);
  return r;
}

AxiGrid small_grid(std::size_t n = 32) { return AxiGrid::make(1, 3, 0.25, 2, n, n); }

double max_diff(const AxiScalarField& a, const AxiScalarField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

double max_rate(const IvseSystem& sys, const AxiScalarField& w) {
  double m = 0.0;
  for (double v : sys.growth_rate(w).values) m = std::max(m, std::abs(v));
  return m;
}

AxiScalarField integrate(AxiScalarField w, double dt, std::size_t steps, const IvseSystem& sys, bool rk4) {
  for (std::size_t n = 0; n < steps; ++n) w = rk4 ? step_rk4(w, dt, sys) : step_exponential(w, dt, sys);
  return w;
}
}  // namespace

TEST_CASE("zero data") {
  const auto g = small_grid(16);
  const IvseSystem sys(g, rule32());
  const AxiScalarField zero(g);
  CHECK(sys.rhs(zero).max_abs() == 0.0);
  CHECK(ivse_rhs(zero, rule32()).max_abs() == 0.0);
  const auto dq = verify_dQdt(zero, sys);
  CHECK(dq.lhs == 0.0);
  CHECK(dq.rhs == 0.0);
  CHECK(dq.residual == 0.0);

  IvseConfig cfg;
  cfg.grid = g;
  cfg.ring.amplitude = 0.0;
  const auto rep = run_ivse(cfg);
  CHECK(rep.Q0 == 0.0);
  for (double q : rep.Q_values) CHECK(q == 0.0);
  CHECK_FALSE(rep.reached_cap);
  CHECK_FALSE(rep.observed_blowup_time_estimate.has_value());
}

TEST_CASE("zero step is the identity and negative steps are rejected") {
  const auto g = small_grid(16);
  const IvseSystem sys(g, rule32());
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  CHECK(step_exponential(w, 0.0, sys).values == w.values);
  CHECK(step_rk4(w, 0.0, sys).values == w.values);
  CHECK_THROWS_AS(step_exponential(w, -1.0, sys), ConfigError);
  CHECK_THROWS_AS(step_rk4(w, -1.0, sys), ConfigError);
}

TEST_CASE("rhs obeys the product sign law") {
  const auto g = small_grid(32);
  const IvseSystem sys(g, rule32());
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const auto rhs = sys.rhs(w);
  const auto ur = sys.biot_savart().radial_velocity(w);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = pick(rng);
    const auto sgn = [](double x) { return (x > 0) - (x < 0); };
    CHECK(sgn(rhs.values[n]) == sgn(w.values[n]) * sgn(ur.values[n]));
  }
}

TEST_CASE("exponential step preserves sign and zeros") {
  const auto g = small_grid(32);
  const IvseSystem sys(g, rule32());
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const auto next = step_exponential(w, 50.0, sys);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(next.values[n] <= 0.0);
    CHECK((next.values[n] == 0.0) == (w.values[n] == 0.0));
  }
}

TEST_CASE("exponential step: half steps and a full step differ at second order") {
  const auto g = small_grid(32);
  const IvseSystem sys(g, rule32());
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const double h = 2.0 / max_rate(sys, w);
  const auto diff = [&](double dt) { return max_diff(integrate(w, dt, 1, sys, false), integrate(w, dt / 2, 2, sys, false)); };
  const double order = std::log2(diff(h) / diff(h / 2));
  MESSAGE("exponential step-halving order " << order);
  CHECK(order >= 1.9);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto g = small_grid(32);
  const IvseSystem sys(g, rule32());
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const double h = 0.125 / max_rate(sys, w);
  const auto a = integrate(w, h, 4, sys, true);
  const auto b = integrate(w, h / 2, 8, sys, true);
  const auto c = integrate(w, h / 4, 16, sys, true);
  const double order = std::log2(max_diff(a, b) / max_diff(b, c));
  MESSAGE("RK4 order " << order);
  CHECK(order >= 3.8);
}

TEST_CASE("dQ/dt: direct, symmetrized and finite-difference forms agree") {
  double prev = INFINITY;
  for (std::size_t n : {32, 64}) {
    const auto g = small_grid(n);
    const IvseSystem sys(g, rule32());
    const auto w = make_vortex_ring_pair(RingProfile{}, g);
    const double kappa = estimate_kappa(support_region(w, 1e-12), rule32()).value;
    const auto rep = verify_dQdt(w, sys, kappa);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.residual <= 0.01);
    CHECK(rep.residual < prev);
    prev = rep.residual;
    REQUIRE(rep.kappa_Q2.has_value());
    CHECK(rep.rhs >= *rep.kappa_Q2 * 0.99);
    const double fd = finite_difference_dQdt(w, sys, 0.01 / max_rate(sys, w));
    CHECK(std::abs(fd - rep.rhs) / rep.rhs <= 0.01);
  }
}

TEST_CASE("blowup time extrapolation recovers an exact profile") {
  std::vector<double> t, s;
  for (int n = 0; n < 50; ++n) {
    t.push_back(0.19 * n);
    s.push_back(3.0 / (10.0 - t.back()));
  }
  const auto est = extrapolate_blowup_time(t, s);
  REQUIRE(est.has_value());
  CHECK(*est == doctest::Approx(10.0).epsilon(1e-10));
  CHECK_FALSE(extrapolate_blowup_time({0.0, 1.0}, {1.0, 2.0}).has_value());
}

TEST_CASE("coarse blowup run respects the lower curve") {
  IvseConfig cfg;
  cfg.grid = small_grid(32);
  cfg.sup_cap_factor = 1e3;
  std::size_t observed = 0;
  cfg.observer = [&](const StepRecord&, const AxiScalarField&) { ++observed; };
  const auto rep = run_ivse(cfg);
  CHECK(rep.reached_cap);
  CHECK(rep.Q_strictly_increasing);
  CHECK(rep.lower_curve_violations == 0);
  CHECK(rep.sign_violations == 0);
  CHECK(rep.exact_support_changes == 0);
  CHECK(rep.predicted_T_upper > 0.0);
  CHECK(observed == rep.times.size());
  REQUIRE(rep.observed_blowup_time_estimate.has_value());
  CHECK(*rep.observed_blowup_time_estimate <= rep.predicted_T_upper_conservative);
}
