#include <cmath>

#include "doctest.h"
#include "ivse/euler.hpp"

using namespace ivse;

namespace {
const PhiQuadRule& rule32() {
  static const PhiQuadRule r = PhiQuadRule::gauss_legendre(32);
  return r;
}

std::array<double, 2> centre_of_mass(const AxiScalarField& w) {
  double m = 0, mr = 0, mz = 0;
  for (std::size_t i = 0; i < w.grid.n_r; ++i)
    for (std::size_t j = 0; j < w.grid.n_z; ++j) {
      m += w.at(i, j);
      mr += w.grid.r(i) * w.at(i, j);
      mz += w.grid.z(j) * w.at(i, j);
    }
  return {mr / m, mz / m};
}
}  // namespace

TEST_CASE("zero field has zero flux divergence") {
  const auto g = AxiGrid::make(0, 4, 0, 2, 16, 16);
  AxiVelocity v(g);
  for (auto& x : v.u_r) x = 0.3;
  CHECK(euler_rhs(AxiScalarField(g), v).max_abs() == 0.0);
  CHECK(cfl_rate(v) == doctest::Approx(0.3 / g.dr()));
}

TEST_CASE("uniform translation moves the centre of mass at the prescribed speed") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2.25, 128, 128);
  const auto w0 = make_vortex_ring_pair(RingProfile{1.7, 0.9, 0.3, 0.3, -1.0}, g);
  AxiVelocity v(g);
  const double ur = 0.3, uz = 0.2;
  for (std::size_t n = 0; n < g.size(); ++n) {
    v.u_r[n] = ur;
    v.u_z[n] = uz;
  }
  const double dt = 0.4 / cfl_rate(v);
  auto w = w0;
  for (int n = 0; n < 100; ++n) w = step_transport(w, v, dt);
  const auto c0 = centre_of_mass(w0), c1 = centre_of_mass(w);
  const double T = 100 * dt;
  CHECK(std::abs((c1[0] - c0[0]) / T - ur) <= 0.01 * ur);
  CHECK(std::abs((c1[1] - c0[1]) / T - uz) <= 0.01 * uz);
  CHECK(circulation(w) == doctest::Approx(circulation(w0)).epsilon(1e-12));
}

TEST_CASE("zero initial data yields zero series") {
  EulerConfig cfg;
  cfg.grid = AxiGrid::make(0, 4, 0, 2, 16, 16);
  cfg.ring.amplitude = 0.0;
  cfg.horizon = 0.5;
  const auto rep = run_euler(cfg);
  CHECK(rep.Q0 == 0.0);
  for (double q : rep.Q_values) CHECK(q == 0.0);
  CHECK(rep.kappa_integral == 0.0);
}

TEST_CASE("Euler dQ/dt is twice the stretching-only value at t = 0") {
  const auto g = AxiGrid::make(0, 4, 0, 2, 96, 48);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const EulerSystem euler(g, rule32());
  const IvseSystem ivse(g, rule32());
  const double ratio = euler_dQdt(w, euler) / verify_dQdt(w, ivse).lhs;
  MESSAGE("ratio " << ratio);
  CHECK(ratio >= 1.98);
  CHECK(ratio <= 2.02);
}

TEST_CASE("short coupled run conserves what it should") {
  EulerConfig cfg;
  cfg.grid = AxiGrid::make(0, 4, 0, 2, 64, 32);
  cfg.horizon = 1.0;
  cfg.snapshot_interval = 0.25;
  const auto rep = run_euler(cfg);
  REQUIRE(rep.snapshots.size() >= 4);
  const auto& first = rep.snapshots.front();
  for (const auto& s : rep.snapshots) {
    CHECK(std::abs(s.energy / first.energy - 1.0) <= 0.02);
    CHECK(std::abs(s.circulation / first.circulation - 1.0) <= 0.005);
    CHECK(s.kappa > 0.0);
  }
  CHECK(rep.sign_violations == 0);
  CHECK(rep.kappa_integral <= rep.bound);
  CHECK(rep.times.back() == doctest::Approx(1.0));
}
