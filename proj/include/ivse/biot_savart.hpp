#pragma once

// Meridian velocity from omega_theta by direct kernel summation.
//
// On a uniform grid the half kernels depend on (i, k, zeta) only, with zeta an
// integer offset in z for direct sources and an integer offset from 2 z_min
// for image sources. Tables of those values are built lazily per
// (target column, source column) pair and reused across evaluations, so a
// velocity evaluation costs one multiply-add per (target, source) pair.

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "ivse/axifield.hpp"
#include "ivse/quadrature.hpp"

namespace ivse {

/// Half a cell diagonal; the default blob radius for a grid.
double default_delta(const AxiGrid& grid);

class BiotSavartOperator {
 public:
  /// delta < 0 selects default_delta(grid).
  BiotSavartOperator(const AxiGrid& grid, PhiQuadRule rule, double delta = -1.0);

  [[nodiscard]] const AxiGrid& grid() const { return grid_; }
  [[nodiscard]] const PhiQuadRule& rule() const { return rule_; }
  [[nodiscard]] double delta() const { return delta_; }

  /// u_r at the given flat target indices. Sources are the nonzero cells of omega.
  void radial_velocity(const AxiScalarField& omega, std::span<const std::size_t> targets,
                       std::span<double> out) const;
  /// u_z at the given flat target indices.
  void vertical_velocity(const AxiScalarField& omega, std::span<const std::size_t> targets,
                         std::span<double> out) const;

  /// u_r on every grid cell.
  [[nodiscard]] AxiScalarField radial_velocity(const AxiScalarField& omega) const;
  /// (u_r, u_z) on every grid cell.
  [[nodiscard]] AxiVelocity velocity(const AxiScalarField& omega) const;

  /// Table-free evaluation at an arbitrary point (z may be negative).
  [[nodiscard]] double radial_velocity_at(const AxiScalarField& omega, double r, double z) const;
  [[nodiscard]] double vertical_velocity_at(const AxiScalarField& omega, double r, double z) const;

  /// Bytes currently held by kernel tables.
  [[nodiscard]] std::size_t table_bytes() const;

 private:
  enum class Kind { radial = 0, vertical = 1 };

  struct Sources {
    std::vector<std::size_t> columns;  // source columns with any nonzero value
    std::vector<std::size_t> lo;       // first nonzero row per column
    std::vector<std::size_t> hi;       // last nonzero row per column (inclusive)
  };

  struct Table {
    std::vector<double> values;  // per (i, k): n_z direct entries then 2 n_z - 1 image entries
    std::vector<char> built;     // per (i, k)
  };

  [[nodiscard]] Sources collect_sources(const AxiScalarField& omega) const;
  void ensure_tables(Kind kind, std::span<const std::size_t> targets, const Sources& sources) const;
  void evaluate(Kind kind, const AxiScalarField& omega, std::span<const std::size_t> targets,
                std::span<double> out) const;
  [[nodiscard]] std::size_t block() const { return 3 * grid_.n_z - 1; }

  AxiGrid grid_;
  PhiQuadRule rule_;
  double delta_;
  mutable std::mutex mutex_;
  mutable Table tables_[2];
};

/// u_r on the field's grid: (1/2pi) sum K_r^odd omega dr dz.
AxiScalarField compute_u_r(const AxiScalarField& field, const PhiQuadRule& rule, double delta = -1.0);

/// (u_r, u_z) on the field's grid.
AxiVelocity compute_velocity(const AxiScalarField& field, const PhiQuadRule& rule, double delta = -1.0);

/// Pointwise (u_r / r) omega_theta: the azimuthal component of P_df((omega . grad) u).
AxiScalarField stretching_rate(const AxiScalarField& field, const AxiScalarField& u_r);

}  // namespace ivse
