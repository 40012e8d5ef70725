#include <cmath>
#include <vector>

#include "doctest.h"
#include "ivse/biot_savart.hpp"

using namespace ivse;

namespace {
const PhiQuadRule& rule32() {
  static const PhiQuadRule r = PhiQuadRule::gauss_legendre(32);
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Max of |d_r(r u_r)/r + d_z u_z| by central differences over cells well outside the ring.
double exterior_divergence(std::size_t n) {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, n, n);
  const auto v = compute_velocity(make_vortex_ring_pair(RingProfile{}, g), rule32());
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double q = std::pow((g.r(i) - 2.0) / 0.5, 2) + std::pow((g.z(j) - 1.0) / 0.5, 2);
      if (q < 1.6) continue;
      const double d = (g.r(i + 1) * v.u_r[g.index(i + 1, j)] - g.r(i - 1) * v.u_r[g.index(i - 1, j)]) /
                           (2.0 * g.dr() * g.r(i)) +
                       (v.u_z[g.index(i, j + 1)] - v.u_z[g.index(i, j - 1)]) / (2.0 * g.dz());
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}
}  // namespace

TEST_CASE("zero vorticity gives zero velocity") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 16, 16);
  const auto v = compute_velocity(AxiScalarField(g), rule32());
  CHECK(max_abs(v.u_r) == 0.0);
  CHECK(max_abs(v.u_z) == 0.0);
  CHECK(max_abs(stretching_rate(AxiScalarField(g), AxiScalarField(g)).values) == 0.0);
}

TEST_CASE("table and direct probe evaluations agree") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 24, 24);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const BiotSavartOperator op(g, rule32());
  const auto v = op.velocity(w);
  for (std::size_t i = 0; i < g.n_r; i += 5) {
    for (std::size_t j = 0; j < g.n_z; j += 3) {
      CHECK(std::abs(v.u_r[g.index(i, j)] - op.radial_velocity_at(w, g.r(i), g.z(j))) < 1e-13);
      CHECK(std::abs(v.u_z[g.index(i, j)] - op.vertical_velocity_at(w, g.r(i), g.z(j))) < 1e-13);
    }
  }
  CHECK(op.table_bytes() > 0);
}

TEST_CASE("u_r is even and u_z odd in z") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 24, 24);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const BiotSavartOperator op(g, rule32());
  for (double r : {0.3, 1.4, 2.05, 3.7}) {
    for (double z : {0.1, 0.77, 1.3, 2.6}) {
      const double ur = op.radial_velocity_at(w, r, z);
      const double uz = op.vertical_velocity_at(w, r, z);
      CHECK(std::abs(op.radial_velocity_at(w, r, -z) - ur) <= 1e-12 * std::max(1.0, std::abs(ur)));
      CHECK(std::abs(op.vertical_velocity_at(w, r, -z) + uz) <= 1e-12 * std::max(1.0, std::abs(uz)));
    }
    CHECK(op.vertical_velocity_at(w, r, 0.0) == 0.0);
  }
}

TEST_CASE("velocity is linear in the vorticity") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 20, 20);
  const auto f = make_vortex_ring_pair(RingProfile{}, g);
  const auto h = make_vortex_ring_pair(RingProfile{2.1, 1.1, 0.3, 0.4, -2.0}, g);
  AxiScalarField mix(g);
  for (std::size_t n = 0; n < g.size(); ++n) mix.values[n] = 0.7 * f.values[n] - 1.3 * h.values[n];
  const auto uf = compute_u_r(f, rule32());
  const auto uh = compute_u_r(h, rule32());
  const auto um = compute_u_r(mix, rule32());
  double scale = 0.0, err = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    scale = std::max(scale, std::abs(um.values[n]));
    err = std::max(err, std::abs(um.values[n] - (0.7 * uf.values[n] - 1.3 * uh.values[n])));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("ring pair pushes outward at its core") {
  // consistent with Q = -sum r^2 omega growing: -sum r u_r omega > 0 needs u_r > 0 where omega < 0
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 64, 64);
  const auto w = make_vortex_ring_pair(RingProfile{2.0, 1.0, 0.2, 0.2, -1.0}, g);
  const BiotSavartOperator op(g, rule32());
  const double ur = op.radial_velocity_at(w, 2.0, 1.0);
  CHECK(ur > 0.0);
  const auto rate = stretching_rate(w, compute_u_r(w, rule32()));
  for (std::size_t n = 0; n < g.size(); ++n)
    if (w.values[n] == 0.0) CHECK(rate.values[n] == 0.0);
}

TEST_CASE("discrete divergence is second order away from the vorticity") {
  const double e1 = exterior_divergence(32);
  const double e2 = exterior_divergence(64);
  MESSAGE("exterior divergence " << e1 << " -> " << e2);
  CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("default regularization is half a cell diagonal") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 40, 20);
  CHECK(default_delta(g) == doctest::Approx(0.5 * std::hypot(g.dr(), g.dz())));
}
