#pragma once

// Axisymmetric swirl-free Euler in divergence form:
//   d/dt omega_theta + d/dr(u_r omega_theta) + d/dz(u_z omega_theta) = 0.
// Finite volumes with MUSCL (van Leer) reconstruction and SSP-RK3.
//
// Boundaries: when z_min = 0 the field continues oddly below the plane, so the
// flux through z = 0 vanishes; when r_min = 0 the flux through the axis is
// zero. Any other edge is an outflow edge with zero inflow.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ivse/axifield.hpp"
#include "ivse/biot_savart.hpp"
#include "ivse/dynamics.hpp"
#include "ivse/kappa.hpp"

namespace ivse {

/// -[d_r(u_r w) + d_z(u_z w)] for a prescribed cell-centred velocity.
AxiScalarField euler_rhs(const AxiScalarField& field, const AxiVelocity& velocity);

/// Largest dt (|u_r|/dr + |u_z|/dz) over the grid, i.e. the CFL number per unit dt.
double cfl_rate(const AxiVelocity& velocity);

class EulerSystem {
 public:
  EulerSystem(const AxiGrid& grid, const PhiQuadRule& rule, double delta = -1.0, std::size_t halo = 2);

  /// Velocity on the nonzero cells of omega plus a halo; zero elsewhere.
  [[nodiscard]] AxiVelocity near_velocity(const AxiScalarField& omega) const;
  /// Velocity on every cell.
  [[nodiscard]] AxiVelocity full_velocity(const AxiScalarField& omega) const;
  [[nodiscard]] AxiScalarField rhs(const AxiScalarField& omega) const;

  [[nodiscard]] const BiotSavartOperator& biot_savart() const { return op_; }

 private:
  BiotSavartOperator op_;
  std::size_t halo_;
};

/// Result of one SSP-RK3 step.
struct EulerStep {
  AxiScalarField field;
  double dt = 0.0;
  std::size_t rejections = 0;
};

/// SSP-RK3 with the velocity recomputed at every stage. If a stage exceeds CFL
/// number `reject_cfl` the step is retried with half the step.
EulerStep step_ssprk3(const AxiScalarField& field, double dt, const EulerSystem& system, double reject_cfl = 1.0);

/// One SSP-RK3 step with a fixed, prescribed velocity (transport only).
AxiScalarField step_transport(const AxiScalarField& field, const AxiVelocity& velocity, double dt);

/// dQ/dt of the discrete Euler dynamics, -sum r^2 rhs dr dz.
double euler_dQdt(const AxiScalarField& field, const EulerSystem& system);

/// 1/2 int |u|^2 over R^3 restricted to the grid: 2 pi sum |u|^2 r dr dz (both halves).
double kinetic_energy(const AxiVelocity& velocity);

/// int int omega dr dz over the stored half.
double circulation(const AxiScalarField& field);

struct EulerConfig {
  RingProfile ring{2.0, 1.0, 0.5, 0.5, -1.0};
  AxiGrid grid = AxiGrid::make(0.0, 4.0, 0.0, 2.0, 256, 256);
  std::size_t rule_order = 32;
  double delta = -1.0;
  double cfl = 0.4;
  double reject_cfl = 1.0;
  double horizon = 5.0;
  /// Diagnostics (kappa, energy, support box) every this much simulated time.
  double snapshot_interval = 0.1;
  /// Support for kappa(t): cells above this fraction of the current max.
  double kappa_threshold = 1e-6;
  KappaSearchSchedule kappa_schedule{{8, 4, 2}, 1500, 0.0, true, 1e-3};
  /// Values below this fraction of the current max are set to zero after each step.
  double flush = 1e-14;
  std::size_t max_steps = 1000000;
  std::function<void(const StepRecord&, const AxiScalarField&)> observer;
};

struct EulerSnapshot {
  double t = 0.0;
  double Q = 0.0;
  double kappa = 0.0;
  double kappa_integral = 0.0;
  double energy = 0.0;
  double circulation = 0.0;
  BoundingBox box;
  double aspect = 0.0;  // box width / height
};

struct AnisoReport {
  std::vector<double> times;
  std::vector<double> Q_values;
  std::vector<double> dt_history;
  std::vector<double> sup_norm_history;
  std::vector<EulerSnapshot> snapshots;
  double Q0 = 0.0;
  double bound = 0.0;  // 1 / (2 Q0)
  double kappa_integral = 0.0;
  std::size_t sign_violations = 0;
  std::size_t rejected_steps = 0;
  std::string stop_reason;
};

AnisoReport run_euler(const EulerConfig& config);
AnisoReport run_euler(const AxiScalarField& initial, const EulerConfig& config);

/// Q(t) of an IVSE run, linearly interpolated; nullopt past its last sample.
std::optional<double> interpolate_Q(const std::vector<double>& times, const std::vector<double>& Q, double t);

struct ComparisonReport {
  double dQdt_ivse = 0.0;
  double dQdt_euler = 0.0;
  double ratio = 0.0;
  BlowupReport ivse;
  AnisoReport euler;
  /// First Euler sample time at or after which Euler Q stays below IVSE Q (if any).
  std::optional<double> depletion_from;
  bool euler_below_from_t1 = false;
};

/// Run both dynamics from the same ring pair sampled on the Euler grid. The IVSE
/// run stops at the Euler horizon or at its sup-norm cap, whichever comes first.
ComparisonReport compare_ivse_vs_euler(const EulerConfig& euler, IvseConfig ivse);

}  // namespace ivse
