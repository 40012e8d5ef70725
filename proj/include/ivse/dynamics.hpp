#pragma once

// Inviscid vortex stretching in axisymmetric swirl-free form:
//   d/dt omega_theta = (u_r / r) omega_theta,
// with u_r recovered from omega_theta at every stage.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ivse/axifield.hpp"
#include "ivse/biot_savart.hpp"
#include "ivse/kappa.hpp"

namespace ivse {

/// Right-hand side evaluator. Holds the Biot-Savart operator so kernel tables
/// are reused across stages and steps.
class IvseSystem {
 public:
  IvseSystem(const AxiGrid& grid, const PhiQuadRule& rule, double delta = -1.0);

  /// u_r / r on the nonzero cells of omega, zero elsewhere.
  [[nodiscard]] AxiScalarField growth_rate(const AxiScalarField& omega) const;
  /// (u_r / r) omega. Vanishes outside the support of omega exactly.
  [[nodiscard]] AxiScalarField rhs(const AxiScalarField& omega) const;

  [[nodiscard]] const BiotSavartOperator& biot_savart() const { return op_; }

 private:
  BiotSavartOperator op_;
};

AxiScalarField ivse_rhs(const AxiScalarField& field, const PhiQuadRule& rule, double delta = -1.0);

/// omega <- omega * exp(dt * u_r / r) with u_r frozen at the start of the step.
/// Throws BlowupImminent if a value would overflow.
AxiScalarField step_exponential(const AxiScalarField& field, double dt, const IvseSystem& system);
/// Classical four-stage Runge-Kutta. Does not preserve sign exactly.
AxiScalarField step_rk4(const AxiScalarField& field, double dt, const IvseSystem& system);

enum class Stepper { exponential, rk4 };

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double Q = 0.0;
  double sup_norm = 0.0;
  double dt = 0.0;        // step that led here (0 for the initial record)
  double lower_curve = 0.0;  // Q0 / (1 - kappa Q0 t), +inf past the predicted time
  bool violation = false;
};

struct IvseConfig {
  RingProfile ring;
  AxiGrid grid = AxiGrid::make(1.0, 3.0, 0.25, 2.0, 128, 128);
  std::size_t rule_order = 32;
  double delta = -1.0;
  Stepper stepper = Stepper::exponential;
  double cfl = 0.1;
  double rate_floor = 1e-12;
  double lower_tolerance = 0.02;
  double sup_cap_factor = 1e6;
  std::size_t max_steps = 200000;
  double max_time = std::numeric_limits<double>::infinity();
  /// Supplied kappa; computed from the initial support when absent.
  std::optional<double> kappa;
  double kappa_safety = 0.9;
  KappaSearchSchedule kappa_schedule;
  double support_threshold = 1e-12;
  /// Called after every accepted step (and once for the initial state).
  std::function<void(const StepRecord&, const AxiScalarField&)> observer;
};

struct BlowupReport {
  std::vector<double> times;
  std::vector<double> Q_values;
  double kappa = 0.0;
  double kappa_conservative = 0.0;
  double Q0 = 0.0;
  double predicted_T_upper = 0.0;               // 1 / (kappa Q0)
  double predicted_T_upper_conservative = 0.0;  // 1 / (0.9 kappa Q0)
  std::size_t lower_curve_violations = 0;
  std::optional<double> observed_blowup_time_estimate;
  std::vector<double> dt_history;
  std::vector<double> sup_norm_history;
  bool reached_cap = false;
  bool Q_strictly_increasing = true;
  std::size_t sign_violations = 0;
  std::size_t support_changes = 0;        // cells entering or leaving the thresholded support
  std::size_t exact_support_changes = 0;  // cells whose zero/nonzero status changed
  std::string stop_reason;
};

/// Integrate the initial ring pair until the sup norm exceeds the cap.
/// Throws NumericalError (naming the step) if the field becomes non-finite.
BlowupReport run_ivse(const IvseConfig& config);
BlowupReport run_ivse(const AxiScalarField& initial, const IvseConfig& config);

/// Slope/intercept fit of 1/sup against t over samples with sup >= sup_end / 10;
/// returns the zero crossing.
std::optional<double> extrapolate_blowup_time(const std::vector<double>& times, const std::vector<double>& sup_norms);

struct DqdtReport {
  double lhs = 0.0;       // -sum r u_r omega dr dz
  double rhs = 0.0;       // symmetrized (z + zbar) quadruple sum
  double residual = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish
  std::optional<double> kappa_Q2;
};

/// dQ/dt two ways. The left side uses the (regularized) velocity of the
/// system; the right side uses the unregularized kernel_G-style bracket.
DqdtReport verify_dQdt(const AxiScalarField& field, const IvseSystem& system,
                       std::optional<double> kappa = std::nullopt);

/// dQ/dt by a central difference of two RK4 steps of size +-h.
double finite_difference_dQdt(const AxiScalarField& field, const IvseSystem& system, double h);

}  // namespace ivse
