#pragma once

// Pseudo-spectral fields on the periodic box [-L/2, L/2)^3.
//
// A field is stored as Fourier-series coefficients c_m with
//   v(x) = sum_m c_m exp(2 pi i m.x / L),
// i.e. the frequency of mode m is xi = m / L and a derivative multiplies by
// 2 pi i xi. Only the half spectrum m_z >= 0 is kept (real fields). With this
// normalization int_box |v|^2 = L^3 sum_m |c_m|^2, and
//   ||v||_{H^s}^2 = L^3 sum_m (1 + 4 pi^2 |xi|^2)^s |c_m|^2
// is the box analogue of the whole-space integral with weight (1 + 4pi^2|xi|^2)^s.
//
// Nyquist modes (|m_i| = n/2) have no well-defined direction; every
// differential operator and projection discards them.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ivse/axifield.hpp"

namespace ivse {

using Complex = std::complex<double>;
using PhysicalVector = std::array<std::vector<double>, 3>;

class SpectralVectorField {
 public:
  SpectralVectorField() = default;
  SpectralVectorField(double length, std::size_t n);

  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t half() const { return n_ / 2 + 1; }
  [[nodiscard]] std::size_t modes() const { return n_ * n_ * half(); }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n_ + j) * half() + k; }
  /// Signed integer wavenumber for storage index i along a full axis.
  [[nodiscard]] long wavenumber(std::size_t i) const {
    return i <= n_ / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_);
  }
  [[nodiscard]] bool is_nyquist(std::size_t i, std::size_t j, std::size_t k) const {
    return 2 * i == n_ || 2 * j == n_ || 2 * k == n_;
  }
  /// Half-spectrum multiplicity: 1 on the k = 0 and k = n/2 planes, else 2.
  [[nodiscard]] double multiplicity(std::size_t k) const { return (k == 0 || 2 * k == n_) ? 1.0 : 2.0; }
  /// Lattice coordinate x_i = -L/2 + i L / n.
  [[nodiscard]] double coordinate(std::size_t i) const {
    return -0.5 * length_ + static_cast<double>(i) * length_ / static_cast<double>(n_);
  }

  std::array<std::vector<Complex>, 3> coeffs;

  static SpectralVectorField from_physical(double length, std::size_t n, const PhysicalVector& values);
  [[nodiscard]] PhysicalVector to_physical() const;

  /// ||xi . v|| / || |xi| v ||  (0 for the zero field).
  [[nodiscard]] double divergence_residual() const;

  SpectralVectorField& operator+=(const SpectralVectorField& other);
  SpectralVectorField& operator-=(const SpectralVectorField& other);
  SpectralVectorField& operator*=(double a);

 private:
  double length_ = 1.0;
  std::size_t n_ = 0;
};

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator*(double s, SpectralVectorField a);

/// v - xi (xi . v) / |xi|^2 mode by mode; the zero mode is left untouched.
SpectralVectorField helmholtz_project(const SpectralVectorField& v);

/// u = curl (-Delta)^{-1} omega. Throws DomainError if the mean of omega is not zero.
SpectralVectorField biot_savart_3d(const SpectralVectorField& omega);

double hs_norm(const SpectralVectorField& v, double s);
double hs_inner(const SpectralVectorField& a, const SpectralVectorField& b, double s);
/// ||grad u||_{H^s} with |grad u|^2 = sum_ij |d_j u_i|^2.
double gradient_hs_norm(const SpectralVectorField& u, double s);

/// Fourier coefficients of a real scalar field, for the algebra check.
double scalar_hs_norm(double length, std::size_t n, const std::vector<double>& f, double s);

/// B(a, b) = 1/2 P[(a . grad) u_b + (b . grad) u_a], products taken in physical
/// space with inputs and output restricted to |m_i| <= n/3.
/// Throws DomainError if n < 8.
SpectralVectorField bilinear_B(const SpectralVectorField& a, const SpectralVectorField& b);

/// omega_theta(r, z) e_theta sampled at lattice points, with the stored
/// half-plane data continued oddly to z < 0 and bilinearly interpolated,
/// then projected onto divergence-free fields (sampling a smooth but
/// finitely-resolved ring leaves a small divergent alias).
/// Throws DomainError unless the support keeps a margin of L/4 from every face.
SpectralVectorField embed_axisymmetric(const AxiScalarField& f, double length, std::size_t n);
/// Same, sampling an analytic ring profile exactly at the lattice points.
SpectralVectorField embed_profile(const RingProfile& profile, double length, std::size_t n);

struct EmbedDiagnostics {
  double raw_divergence = 0.0;  // before projection
  double projected_divergence = 0.0;
};
EmbedDiagnostics embed_profile_diagnostics(const RingProfile& profile, double length, std::size_t n);

/// Exact trigonometric interpolation of a vector field onto the meridian
/// half-plane y = 0, x = r > 0, at the cell centres of grid. Returns
/// (v_r, v_theta, v_z) = (v_x, v_y, v_z) there.
std::array<AxiScalarField, 3> meridian_pullback(const SpectralVectorField& v, const AxiGrid& grid);

/// Smooth random divergence-free field with zero mean, no Nyquist content and
/// spectrum ~ exp(-|m|^2 / (2 k0^2)); normalized to unit L^2 norm.
SpectralVectorField random_divergence_free(double length, std::size_t n, std::uint64_t seed, double k0 = 4.0);
/// Random field with both divergence-free and gradient parts.
SpectralVectorField random_field(double length, std::size_t n, std::uint64_t seed, double k0 = 4.0);
/// Smooth random real scalar field with zero mean.
std::vector<double> random_scalar(double length, std::size_t n, std::uint64_t seed, double k0 = 4.0);

/// Vorticity of the Taylor-Green velocity
///   u = amplitude (sin X cos Y cos Z, -cos X sin Y cos Z, 0),  X = 2 pi x / L, ...
SpectralVectorField taylor_green_vorticity(double length, std::size_t n, double amplitude);

struct BilinearConstant {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::vector<double> ratios;
};
/// ||B(a,b)||_{H^s} / (||a||_{H^s} ||b||_{H^s}) over random pairs (plus any extra fields).
BilinearConstant measure_bilinear_constant(double length, std::size_t n, double s, std::size_t pairs,
                                           std::uint64_t seed, const std::vector<SpectralVectorField>& extra = {});

struct PicardReport {
  std::vector<double> distances;  // sup over time nodes of ||w^{k+1} - w^k||_{H^s}
  std::vector<double> ratios;     // distances[k+1] / distances[k]
  bool converged = false;
  bool non_contraction = false;   // ratio >= 1 for 3 consecutive iterations
  std::size_t iterations = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;        // ||w(T)||_{H^s}
  double max_norm = 0.0;          // sup over time nodes
  std::vector<SpectralVectorField> trajectory;  // w at the time nodes
};

/// Picard iteration for w(t) = omega0 + int_0^t B(w, w) d tau on [0, T] with a
/// composite trapezoid rule on `substeps` uniform intervals.
PicardReport picard_solve(const SpectralVectorField& omega0, double s, double T, std::size_t substeps,
                          std::size_t max_iter, double tol);

}  // namespace ivse
