#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ivse/axifield.hpp"
#include "ivse/quadrature.hpp"

namespace ivse {

/// Coarse-to-fine sampling schedule for the pair search.
struct KappaSearchSchedule {
  std::vector<std::size_t> strides{8, 4, 2, 1};
  /// Levels whose sample count would exceed this are skipped.
  std::size_t max_points = 4000;
  /// Sample points closer than this to r = 0 or z = 0 make the estimate degenerate.
  double axis_tolerance = 0.0;
  bool local_refinement = true;
  /// Smallest coordinate step of the local descent, as a fraction of a cell.
  double min_step = 1e-3;
};

struct KappaLevel {
  std::size_t stride = 0;
  std::size_t points = 0;
  double value = 0.0;
};

struct KappaEstimate {
  double value = 0.0;
  std::array<double, 2> argmin_a{};  // (r, z)
  std::array<double, 2> argmin_b{};  // (rbar, zbar)
  std::size_t n_r = 0;
  std::size_t n_z = 0;
  std::vector<KappaLevel> history;

  /// Scaled-down value used when the direction of a bound requires kappa not be overestimated.
  [[nodiscard]] double conservative(double factor = 0.9) const { return factor * value; }
};

/// (1/2pi) * kernel_G at a pair of points: the quantity whose infimum is kappa.
double kappa_pair_value(double r, double z, double rbar, double zbar, const PhiQuadRule& rule);

/// Estimate of kappa = (1/2pi) inf over pairs in the region of int_0^1 g ds.
/// Exhaustive pair search over boundary cells plus a strided interior lattice,
/// refined level by level, then coordinate descent inside the region from the
/// best pair. This is an estimate of the infimum, not a certified bound.
KappaEstimate estimate_kappa(const SupportRegion& region, const PhiQuadRule& rule,
                             const KappaSearchSchedule& schedule = {});

}  // namespace ivse
