#pragma once

// Meridian-plane kernels of the axisymmetric Biot-Savart law.
//
// The azimuthal integrals are written in the variable s = cos(phi) and
// evaluated in phi on (0, pi/2), which removes the (1 - s^2)^(-1/2) endpoint
// singularity exactly:
//   int_0^1 s (1 - s^2)^(-1/2) f(s) ds = int_0^{pi/2} cos(phi) f(cos phi) dphi.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ivse/common.hpp"

namespace ivse {

/// Gauss-Legendre rule on (0, pi/2).
struct PhiQuadRule {
  std::size_t order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static PhiQuadRule gauss_legendre(std::size_t order);
};

/// Target (r, z) and source (r_src, z_src) in the meridian plane.
struct KernelArgs {
  double r = 0.0;
  double z = 0.0;
  double r_src = 0.0;
  double z_src = 0.0;
};

/// sum_i w_i cos(phi_i) f(cos phi_i). Non-finite f values raise EvaluationError.
template <typename F>
double s_integral(F&& f, const PhiQuadRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.order; ++i) {
    const double c = std::cos(rule.nodes[i]);
    const double v = f(c);
    if (!std::isfinite(v)) throw EvaluationError("s_integral: non-finite integrand", i);
    acc += rule.weights[i] * c * v;
  }
  return acc;
}

// Half kernels. `zeta` is the vertical offset of a single (direct or image)
// source; `delta` is the blob regularization added to squared distances.
// Near-coincident arguments are integrated on panels graded toward phi = 0.

/// rbar * zeta * int_0^1 s (1-s^2)^(-1/2) [D_-^(-3/2) - D_+^(-3/2)] ds,
/// D_(-/+) = zeta^2 + r^2 + rbar^2 + delta^2 -/+ 2 r rbar s.  Odd in zeta.
double radial_half_kernel(double r, double r_src, double zeta, const PhiQuadRule& rule, double delta = 0.0);

/// rbar * int_0^1 (1-s^2)^(-1/2) [(rbar - r s) D_-^(-3/2) + (rbar + r s) D_+^(-3/2)] ds.  Even in zeta.
double vertical_half_kernel(double r, double r_src, double zeta, const PhiQuadRule& rule, double delta = 0.0);

/// Odd-symmetrized u_r kernel: u_r(r,z) = (1/2pi) int int K_r ω_θ(rbar,zbar) drbar dzbar over z̄ > 0.
double kernel_Kr_odd(const KernelArgs& args, const PhiQuadRule& rule, double delta = 0.0);

/// u_z kernel with the odd image folded in (numerator rbar (rbar - r cos phi)).
double kernel_Kz_full(const KernelArgs& args, const PhiQuadRule& rule, double delta = 0.0);

/// The u_z kernel as displayed with an extra (z - zbar) factor. Kept only so
/// the discriminating comparison against the spectral solver can be run.
double kernel_Kz_printed(const KernelArgs& args, const PhiQuadRule& rule, double delta = 0.0);

/// int_0^1 g ds with g = (z+zbar) s (1-s^2)^(-1/2) / (r rbar) [D_-^(-3/2) - D_+^(-3/2)],
/// D evaluated at z + zbar. Requires r, rbar, z, zbar > 0; throws NumericalError if
/// the result is not strictly positive.
double kernel_G(const KernelArgs& args, const PhiQuadRule& rule);

}  // namespace ivse
