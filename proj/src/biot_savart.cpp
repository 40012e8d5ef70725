#include "ivse/biot_savart.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace ivse {

double default_delta(const AxiGrid& grid) { return 0.5 * std::hypot(grid.dr(), grid.dz()); }

BiotSavartOperator::BiotSavartOperator(const AxiGrid& grid, PhiQuadRule rule, double delta)
    : grid_(grid), rule_(std::move(rule)), delta_(delta < 0.0 ? default_delta(grid) : delta) {}

BiotSavartOperator::Sources BiotSavartOperator::collect_sources(const AxiScalarField& omega) const {
  if (!(omega.grid == grid_)) throw DomainError("biot-savart: field grid does not match operator grid");
  Sources s;
  const std::size_t nz = grid_.n_z;
  for (std::size_t k = 0; k < grid_.n_r; ++k) {
    const double* col = omega.values.data() + k * nz;
    std::size_t lo = nz;
    std::size_t hi = 0;
    for (std::size_t l = 0; l < nz; ++l) {
      if (col[l] != 0.0) {
        lo = std::min(lo, l);
        hi = l;
      }
    }
    if (lo < nz) {
      s.columns.push_back(k);
      s.lo.push_back(lo);
      s.hi.push_back(hi);
    }
  }
  return s;
}

void BiotSavartOperator::ensure_tables(Kind kind, std::span<const std::size_t> targets,
                                       const Sources& sources) const {
  std::lock_guard lock(mutex_);
  Table& table = tables_[static_cast<int>(kind)];
  const std::size_t nr = grid_.n_r;
  const std::size_t nz = grid_.n_z;
  if (table.built.empty()) {
    table.built.assign(nr * nr, 0);
    table.values.assign(nr * nr * block(), 0.0);
  }
  std::vector<char> target_cols(nr, 0);
  for (std::size_t t : targets) target_cols[t / nz] = 1;
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < nr; ++i) {
    if (!target_cols[i]) continue;
    for (std::size_t k : sources.columns)
      if (!table.built[i * nr + k]) missing.push_back(i * nr + k);
  }
  if (missing.empty()) return;

  const double dz = grid_.dz();
  const double zmin2 = 2.0 * grid_.z_min;
  const auto n_missing = static_cast<long>(missing.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long m = 0; m < n_missing; ++m) {
    const std::size_t pair = missing[static_cast<std::size_t>(m)];
    const double r = grid_.r(pair / nr);
    const double rs = grid_.r(pair % nr);
    double* out = table.values.data() + pair * block();
    for (std::size_t d = 0; d < nz; ++d) {
      const double zeta = static_cast<double>(d) * dz;
      if (kind == Kind::radial) {
        out[d] = radial_half_kernel(r, rs, zeta, rule_, delta_);
      } else {
        out[d] = (d == 0 && r == rs && delta_ == 0.0) ? 0.0 : vertical_half_kernel(r, rs, zeta, rule_, delta_);
      }
    }
    for (std::size_t p = 0; p + 1 < 2 * nz; ++p) {
      const double zeta = zmin2 + static_cast<double>(p + 1) * dz;
      out[nz + p] = kind == Kind::radial ? radial_half_kernel(r, rs, zeta, rule_, delta_)
                                         : vertical_half_kernel(r, rs, zeta, rule_, delta_);
    }
  }
  for (std::size_t pair : missing) table.built[pair] = 1;
}

void BiotSavartOperator::evaluate(Kind kind, const AxiScalarField& omega, std::span<const std::size_t> targets,
                                  std::span<double> out) const {
  if (out.size() != targets.size()) throw DomainError("biot-savart: output span size mismatch");
  const Sources sources = collect_sources(omega);
  if (sources.columns.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  ensure_tables(kind, targets, sources);

  const Table& table = tables_[static_cast<int>(kind)];
  const std::size_t nr = grid_.n_r;
  const std::size_t nz = grid_.n_z;
  const std::size_t ncols = sources.columns.size();
  const double prefactor = grid_.cell_area() / (2.0 * kPi);
  const double odd_sign = kind == Kind::radial ? -1.0 : 1.0;
  const auto n_targets = static_cast<long>(targets.size());

#pragma omp parallel
  {
    std::vector<double> partial(ncols);
#pragma omp for schedule(static)
    for (long t = 0; t < n_targets; ++t) {
      const std::size_t cell = targets[static_cast<std::size_t>(t)];
      const std::size_t i = cell / nz;
      const std::size_t j = cell % nz;
      for (std::size_t c = 0; c < ncols; ++c) {
        const std::size_t k = sources.columns[c];
        const double* tab = table.values.data() + (i * nr + k) * block();
        const double* direct = tab;
        const double* image = tab + nz;
        const double* w = omega.values.data() + k * nz;
        const std::size_t lo = sources.lo[c];
        const std::size_t hi = sources.hi[c];
        double acc = 0.0;
        // sources below or level with the target: zeta = (j - l) dz >= 0
        const std::size_t below_hi = std::min(hi, j);
        for (std::size_t l = lo; l <= below_hi && below_hi >= lo; ++l) acc += (direct[j - l] - image[j + l]) * w[l];
        // sources above the target: zeta < 0
        for (std::size_t l = std::max(lo, j + 1); l <= hi; ++l) acc += (odd_sign * direct[l - j] - image[j + l]) * w[l];
        partial[c] = acc;
      }
      out[static_cast<std::size_t>(t)] = prefactor * pairwise_sum(partial);
    }
  }
}

void BiotSavartOperator::radial_velocity(const AxiScalarField& omega, std::span<const std::size_t> targets,
                                         std::span<double> out) const {
  evaluate(Kind::radial, omega, targets, out);
}

void BiotSavartOperator::vertical_velocity(const AxiScalarField& omega, std::span<const std::size_t> targets,
                                           std::span<double> out) const {
  evaluate(Kind::vertical, omega, targets, out);
}

namespace {

std::vector<std::size_t> all_cells(const AxiGrid& g) {
  std::vector<std::size_t> cells(g.size());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
  return cells;
}

}  // namespace

AxiScalarField BiotSavartOperator::radial_velocity(const AxiScalarField& omega) const {
  AxiScalarField u(grid_);
  const auto cells = all_cells(grid_);
  radial_velocity(omega, cells, u.values);
  return u;
}

AxiVelocity BiotSavartOperator::velocity(const AxiScalarField& omega) const {
  AxiVelocity v(grid_);
  const auto cells = all_cells(grid_);
  radial_velocity(omega, cells, v.u_r);
  vertical_velocity(omega, cells, v.u_z);
  return v;
}

double BiotSavartOperator::radial_velocity_at(const AxiScalarField& omega, double r, double z) const {
  if (!(omega.grid == grid_)) throw DomainError("biot-savart: field grid does not match operator grid");
  std::vector<double> terms;
  terms.reserve(grid_.size());
  for (std::size_t k = 0; k < grid_.n_r; ++k)
    for (std::size_t l = 0; l < grid_.n_z; ++l) {
      const double w = omega.at(k, l);
      if (w == 0.0) continue;
      terms.push_back(kernel_Kr_odd({r, z, grid_.r(k), grid_.z(l)}, rule_, delta_) * w);
    }
  return grid_.cell_area() / (2.0 * kPi) * pairwise_sum(terms);
}

double BiotSavartOperator::vertical_velocity_at(const AxiScalarField& omega, double r, double z) const {
  if (!(omega.grid == grid_)) throw DomainError("biot-savart: field grid does not match operator grid");
  std::vector<double> terms;
  terms.reserve(grid_.size());
  for (std::size_t k = 0; k < grid_.n_r; ++k)
    for (std::size_t l = 0; l < grid_.n_z; ++l) {
      const double w = omega.at(k, l);
      if (w == 0.0) continue;
      terms.push_back(kernel_Kz_full({r, z, grid_.r(k), grid_.z(l)}, rule_, delta_) * w);
    }
  return grid_.cell_area() / (2.0 * kPi) * pairwise_sum(terms);
}

std::size_t BiotSavartOperator::table_bytes() const {
  std::lock_guard lock(mutex_);
  return 8 * (tables_[0].values.size() + tables_[1].values.size());
}

AxiScalarField compute_u_r(const AxiScalarField& field, const PhiQuadRule& rule, double delta) {
  return BiotSavartOperator(field.grid, rule, delta).radial_velocity(field);
}

AxiVelocity compute_velocity(const AxiScalarField& field, const PhiQuadRule& rule, double delta) {
  return BiotSavartOperator(field.grid, rule, delta).velocity(field);
}

AxiScalarField stretching_rate(const AxiScalarField& field, const AxiScalarField& u_r) {
  if (!(field.grid == u_r.grid)) throw DomainError("stretching_rate: grids differ");
  const AxiGrid& g = field.grid;
  AxiScalarField out(g);
  for (std::size_t i = 0; i < g.n_r; ++i) {
    const double inv_r = 1.0 / g.r(i);
    for (std::size_t j = 0; j < g.n_z; ++j) out.at(i, j) = u_r.at(i, j) * inv_r * field.at(i, j);
  }
  return out;
}

}  // namespace ivse
