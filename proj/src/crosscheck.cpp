#include "ivse/crosscheck.hpp"

#include <cmath>

#include "ivse/biot_savart.hpp"
#include "ivse/dynamics.hpp"

namespace ivse {

double relative_l2(const AxiScalarField& a, const AxiScalarField& b, std::size_t stride) {
  const AxiGrid& g = b.grid;
  std::vector<double> num, den;
  for (std::size_t i = 0; i < g.n_r; i += stride)
    for (std::size_t j = 0; j < g.n_z; j += stride) {
      const double d = a.at(i, j) - b.at(i, j);
      num.push_back(g.r(i) * d * d);
      den.push_back(g.r(i) * b.at(i, j) * b.at(i, j));
    }
  const double dd = pairwise_sum(den);
  return dd > 0.0 ? std::sqrt(pairwise_sum(num) / dd) : std::sqrt(pairwise_sum(num));
}

CrossCheckReport axisymmetric_crosscheck(const CrossCheckConfig& config) {
  if (config.printed_stride == 0) throw ConfigError("axisymmetric_crosscheck: printed_stride must be positive");
  CrossCheckReport rep;
  const PhiQuadRule rule = PhiQuadRule::gauss_legendre(config.rule_order);
  const AxiGrid& g = config.grid;
  const AxiScalarField omega = make_vortex_ring_pair(config.ring, g);

  // axisymmetric side
  const IvseSystem system(g, rule, config.delta);
  const AxiScalarField stretch = system.rhs(omega);
  const AxiVelocity vel = system.biot_savart().velocity(omega);

  // spectral side
  const SpectralVectorField w = embed_profile(config.ring, config.box_length, config.box_n);
  rep.divergence_residual = w.divergence_residual();
  rep.l2_spectral = hs_norm(w, 0.0);
  {
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.n_r; ++i)
      for (std::size_t j = 0; j < g.n_z; ++j) terms[g.index(i, j)] = omega.at(i, j) * omega.at(i, j) * g.r(i);
    // the lower half mirrors the upper half
    rep.l2_axisymmetric = std::sqrt(2.0 * 2.0 * kPi * pairwise_sum(terms) * g.cell_area());
  }
  {
    const auto b = meridian_pullback(bilinear_B(w, w), g);
    rep.stretching_error = relative_l2(b[1], stretch);
  }
  if (!config.velocities) return rep;
  const auto u = meridian_pullback(biot_savart_3d(w), g);
  AxiScalarField ur(g, vel.u_r), uz(g, vel.u_z);
  rep.u_r_error = relative_l2(u[0], ur);
  rep.u_z_error = relative_l2(u[2], uz, config.printed_stride);

  // printed form, summed directly on the subsampled targets
  AxiScalarField printed(g);
  std::vector<std::size_t> sources;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (omega.values[c] != 0.0) sources.push_back(c);
  const double delta = config.delta < 0.0 ? default_delta(g) : config.delta;
  const auto ni = static_cast<long>(g.n_r);
#pragma omp parallel for schedule(dynamic, 1)
  for (long il = 0; il < ni; il += static_cast<long>(config.printed_stride)) {
    const auto i = static_cast<std::size_t>(il);
    std::vector<double> terms(sources.size());
    for (std::size_t j = 0; j < g.n_z; j += config.printed_stride) {
      for (std::size_t s = 0; s < sources.size(); ++s) {
        const std::size_t c = sources[s];
        terms[s] = kernel_Kz_printed({g.r(i), g.z(j), g.r(c / g.n_z), g.z(c % g.n_z)}, rule, delta) * omega.values[c];
      }
      printed.at(i, j) = pairwise_sum(terms) * g.cell_area() / (2.0 * kPi);
    }
  }
  rep.u_z_printed_error = relative_l2(u[2], printed, config.printed_stride);
  return rep;
}

}  // namespace ivse
