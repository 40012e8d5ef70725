#pragma once

// Comparisons between the axisymmetric kernel path and the 3D spectral oracle
// on the same ring pair.

#include <cstddef>

#include "ivse/axifield.hpp"
#include "ivse/quadrature.hpp"
#include "ivse/spectral.hpp"

namespace ivse {

struct CrossCheckConfig {
  RingProfile ring;
  AxiGrid grid = AxiGrid::make(1.0, 3.0, 0.25, 2.0, 128, 128);
  std::size_t rule_order = 32;
  double delta = -1.0;
  double box_length = 10.0;
  std::size_t box_n = 128;
  /// The printed-form u_z is summed directly; it is sampled on every stride-th cell.
  std::size_t printed_stride = 2;
  /// False: stop after the stretching comparison.
  bool velocities = true;
};

struct CrossCheckReport {
  /// Relative r-weighted L^2 errors over the meridian grid.
  double stretching_error = 0.0;  // B(w, w)_theta vs (u_r / r) omega_theta
  double u_r_error = 0.0;
  double u_z_error = 0.0;          // implemented kernel
  double u_z_printed_error = 0.0;  // kernel with the extra (z - zbar) factor
  /// ||omega||_{L^2} from the spectral coefficients and from 2 pi int int |w|^2 r over both halves.
  double l2_spectral = 0.0;
  double l2_axisymmetric = 0.0;
  double divergence_residual = 0.0;
};

CrossCheckReport axisymmetric_crosscheck(const CrossCheckConfig& config);

/// sqrt(sum r (a - b)^2 / sum r b^2) over the cells of the grid (or over the
/// cells with index divisible by stride in both directions).
double relative_l2(const AxiScalarField& a, const AxiScalarField& b, std::size_t stride = 1);

}  // namespace ivse
