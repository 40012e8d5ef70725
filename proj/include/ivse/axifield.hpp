#pragma once

// Fields on the meridian half-plane {(r, z) : r >= 0, z >= 0}.
//
// Every field stores only its upper-half-plane restriction. The full field is
// the odd extension in z, so oddness holds by construction.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ivse/common.hpp"

namespace ivse {

/// Cell-centred rectangular grid on [r_min, r_max] x [z_min, z_max].
/// Sample (i, j) sits at the centre of its cell; storage is row-major with
/// z fastest, so each radial column is contiguous.
struct AxiGrid {
  double r_min = 0.0;
  double r_max = 1.0;
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t n_r = 2;
  std::size_t n_z = 2;

  /// Validated constructor. Requires r_min >= 0, z_min >= 0, positive extents
  /// and at least two cells per direction.
  static AxiGrid make(double r_min, double r_max, double z_min, double z_max,
                      std::size_t n_r, std::size_t n_z);

  [[nodiscard]] double dr() const { return (r_max - r_min) / static_cast<double>(n_r); }
  [[nodiscard]] double dz() const { return (z_max - z_min) / static_cast<double>(n_z); }
  [[nodiscard]] double r(std::size_t i) const { return r_min + (static_cast<double>(i) + 0.5) * dr(); }
  [[nodiscard]] double z(std::size_t j) const { return z_min + (static_cast<double>(j) + 0.5) * dz(); }
  [[nodiscard]] std::size_t size() const { return n_r * n_z; }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return i * n_z + j; }
  [[nodiscard]] double cell_area() const { return dr() * dz(); }

  /// True when the grid rectangle stays away from the axis and the plane z = 0.
  [[nodiscard]] bool separated_from_axis_and_plane() const { return r_min > 0.0 && z_min > 0.0; }

  bool operator==(const AxiGrid&) const = default;
};

/// Samples of the azimuthal vorticity omega_theta on an AxiGrid (upper half only).
struct AxiScalarField {
  AxiGrid grid;
  std::vector<double> values;

  AxiScalarField() = default;
  explicit AxiScalarField(const AxiGrid& g) : grid(g), values(g.size(), 0.0) {}
  AxiScalarField(const AxiGrid& g, std::vector<double> v);

  [[nodiscard]] double& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;
};

/// Meridian velocity (u_r, u_z) collocated with the vorticity samples.
struct AxiVelocity {
  AxiGrid grid;
  std::vector<double> u_r;
  std::vector<double> u_z;

  AxiVelocity() = default;
  explicit AxiVelocity(const AxiGrid& g) : grid(g), u_r(g.size(), 0.0), u_z(g.size(), 0.0) {}
};

/// Bounding box of cell centres, (r_lo, r_hi, z_lo, z_hi).
struct BoundingBox {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double z_lo = 0.0;
  double z_hi = 0.0;

  [[nodiscard]] double width() const { return r_hi - r_lo; }
  [[nodiscard]] double height() const { return z_hi - z_lo; }
};

/// Cells where |omega_theta| exceeds a threshold.
struct SupportRegion {
  AxiGrid grid;
  std::vector<std::size_t> cells;  // flat indices, ascending
  BoundingBox box;

  [[nodiscard]] bool empty() const { return cells.empty(); }
  [[nodiscard]] std::vector<char> mask() const;
  /// True if (r, z) lies in the closed union of the region's cells.
  [[nodiscard]] bool covers(double r, double z) const;
  /// Build from an explicit cell list (sorted, deduplicated here).
  static SupportRegion from_cells(const AxiGrid& grid, std::vector<std::size_t> cells);
};

/// Smooth compactly supported vortex-ring profile in the upper half-plane:
/// amplitude * exp(-1 / (1 - q)) for q = ((r - r_c)/rho_r)^2 + ((z - z_c)/rho_z)^2 < 1.
struct RingProfile {
  double r_c = 2.0;
  double z_c = 1.0;
  double rho_r = 0.5;
  double rho_z = 0.5;
  double amplitude = -1.0;

  /// Value at a point of the upper half-plane.
  [[nodiscard]] double operator()(double r, double z) const;
  /// Value of the odd extension at any z.
  [[nodiscard]] double odd(double r, double z) const;
};

/// Vortex-ring pair (the ring above z = 0 and its negative mirror image).
/// Throws ConfigError naming the violated constraint.
AxiScalarField make_vortex_ring_pair(std::array<double, 2> center, std::array<double, 2> radii,
                                     double amplitude, const AxiGrid& grid);
AxiScalarField make_vortex_ring_pair(const RingProfile& profile, const AxiGrid& grid);

/// Q = -sum r^2 omega dr dz over the upper-half grid (midpoint rule).
double functional_Q(const AxiScalarField& field);

struct GeometryReport {
  double max_positive = 0.0;
  std::optional<std::array<std::size_t, 2>> max_positive_at;
  double boundary_max_abs = 0.0;
  std::optional<BoundingBox> support_box;

  [[nodiscard]] bool sign_ok() const { return max_positive <= 0.0; }
  [[nodiscard]] bool boundary_ok() const { return boundary_max_abs == 0.0; }
  [[nodiscard]] bool ok() const { return sign_ok() && boundary_ok(); }
};

/// Sign and compact-support diagnostics on stored half-plane data.
GeometryReport validate_geometry(const AxiScalarField& field);

/// Cells with |value| > threshold. Throws EmptyRegionError when none qualify.
SupportRegion support_region(const AxiScalarField& field, double threshold);

// Snapshot files: <base>.bin holds a 48-byte little-endian header
// (r_min, r_max, z_min, z_max as f64; n_r, n_z as u64) followed by the
// row-major f64 payload; <base>.json is a metadata sidecar.
void write_snapshot(const std::filesystem::path& base, const AxiScalarField& field,
                    const nlohmann::json& metadata = nlohmann::json::object());
AxiScalarField read_snapshot(const std::filesystem::path& bin_path);

}  // namespace ivse
