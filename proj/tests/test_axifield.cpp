#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "ivse/axifield.hpp"

using namespace ivse;

namespace {
// -int int r^2 omega over the ring, adaptive 2D quadrature (scipy dblquad), see oracles/kernels.py
constexpr double kRingQ = 0.47032192176808124;
}

TEST_CASE("grid construction validates its bounds") {
  CHECK_THROWS_AS(AxiGrid::make(-0.1, 1, 0, 1, 4, 4), ConfigError);
  CHECK_THROWS_AS(AxiGrid::make(0, 1, -1, 1, 4, 4), ConfigError);
  CHECK_THROWS_AS(AxiGrid::make(1, 1, 0, 1, 4, 4), ConfigError);
  CHECK_THROWS_AS(AxiGrid::make(0, 1, 0, 1, 1, 4), ConfigError);
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 8, 7);
  CHECK(g.dr() == doctest::Approx(0.25));
  CHECK(g.r(0) == doctest::Approx(1.125));
  CHECK(g.index(2, 3) == 2 * 7 + 3);
}

TEST_CASE("ring pair is nonpositive and compactly supported") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 64, 64);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const auto rep = validate_geometry(w);
  CHECK(rep.ok());
  REQUIRE(rep.support_box.has_value());
  CHECK(rep.support_box->r_lo > 1.5);
  CHECK(rep.support_box->r_hi < 2.5);
  CHECK(w.max_abs() == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("ring pair rejects bad geometry") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 32, 32);
  RingProfile p;
  p.amplitude = 1.0;
  CHECK_THROWS_AS(make_vortex_ring_pair(p, g), ConfigError);
  p = RingProfile{};
  p.r_c = 1.2;
  CHECK_THROWS_AS(make_vortex_ring_pair(p, g), ConfigError);
  p = RingProfile{};
  p.z_c = 0.4;
  CHECK_THROWS_AS(make_vortex_ring_pair(p, g), ConfigError);
  p = RingProfile{};
  p.amplitude = 0.0;
  CHECK(make_vortex_ring_pair(p, g).max_abs() == 0.0);
}

TEST_CASE("Q matches the adaptive quadrature reference") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 256, 256);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  CHECK(std::abs(functional_Q(w) / kRingQ - 1.0) < 1e-9);
  CHECK(std::abs(functional_Q(w) / kRingQ - 1.0) < 1e-3);

  const auto coarse = make_vortex_ring_pair(RingProfile{}, AxiGrid::make(1, 3, 0.25, 2, 64, 64));
  AxiScalarField scaled = coarse;
  for (auto& v : scaled.values) v *= 3.5;
  CHECK(functional_Q(scaled) == doctest::Approx(3.5 * functional_Q(coarse)).epsilon(1e-14));
  CHECK(functional_Q(AxiScalarField(g)) == 0.0);
}

TEST_CASE("geometry report flags a planted positive value") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 32, 32);
  auto w = make_vortex_ring_pair(RingProfile{}, g);
  w.at(16, 14) = 0.25;
  const auto rep = validate_geometry(w);
  CHECK_FALSE(rep.sign_ok());
  REQUIRE(rep.max_positive_at.has_value());
  CHECK((*rep.max_positive_at)[0] == 16);
  CHECK((*rep.max_positive_at)[1] == 14);

  const auto zero = validate_geometry(AxiScalarField(g));
  CHECK(zero.ok());
  CHECK_FALSE(zero.support_box.has_value());
}

TEST_CASE("support region") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 128, 128);
  CHECK_THROWS_AS(support_region(AxiScalarField(g), 0.0), EmptyRegionError);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  CHECK_THROWS_AS(support_region(w, 1.0), EmptyRegionError);
  const auto s = support_region(w, 1e-12);
  // exp(-1/(1-q)) > 1e-12 inside q < 1 - 1/ln(1e12); one cell of slack
  const double half = 0.5 * std::sqrt(1.0 - 1.0 / std::log(1e12));
  CHECK(std::abs(s.box.r_lo - (2.0 - half)) <= g.dr());
  CHECK(std::abs(s.box.r_hi - (2.0 + half)) <= g.dr());
  CHECK(std::abs(s.box.z_lo - (1.0 - half)) <= g.dz());
  CHECK(std::abs(s.box.z_hi - (1.0 + half)) <= g.dz());
  CHECK(s.covers(2.0, 1.0));
  CHECK_FALSE(s.covers(1.2, 0.3));
}

TEST_CASE("snapshot round trip is bit exact") {
  const auto g = AxiGrid::make(1, 3, 0.25, 2, 20, 12);
  const auto w = make_vortex_ring_pair(RingProfile{}, g);
  const auto dir = std::filesystem::temp_directory_path() / "ivse_snapshot_test";
  std::filesystem::create_directories(dir);
  write_snapshot(dir / "snap", w, {{"t", 0.5}});
  const auto back = read_snapshot(dir / "snap.bin");
  CHECK(back.grid == g);
  CHECK(back.values == w.values);
  std::filesystem::remove_all(dir);
}
