#include "ivse/kappa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

namespace ivse {

double kappa_pair_value(double r, double z, double rbar, double zbar, const PhiQuadRule& rule) {
  return kernel_G({r, z, rbar, zbar}, rule) / (2.0 * kPi);
}

namespace {

struct PairResult {
  double value = std::numeric_limits<double>::infinity();
  std::size_t a = 0;
  std::size_t b = 0;
};

std::vector<std::size_t> boundary_cells(const SupportRegion& region, const std::vector<char>& mask) {
  const AxiGrid& g = region.grid;
  std::vector<std::size_t> out;
  for (std::size_t c : region.cells) {
    const std::size_t i = c / g.n_z;
    const std::size_t j = c % g.n_z;
    const bool edge = i == 0 || j == 0 || i + 1 == g.n_r || j + 1 == g.n_z || !mask[g.index(i - 1, j)] ||
                      !mask[g.index(i + 1, j)] || !mask[g.index(i, j - 1)] || !mask[g.index(i, j + 1)];
    if (edge) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> level_points(const SupportRegion& region, const std::vector<std::size_t>& boundary,
                                      std::size_t stride) {
  const AxiGrid& g = region.grid;
  std::vector<std::size_t> pts;
  // the minimizing pair sits on the boundary in practice, so boundary cells are
  // always kept; the interior is sampled on a strided lattice
  pts = boundary;
  for (std::size_t c : region.cells) {
    const std::size_t i = c / g.n_z;
    const std::size_t j = c % g.n_z;
    if (i % stride == 0 && j % stride == 0) pts.push_back(c);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

PairResult search_pairs(const AxiGrid& g, const std::vector<std::size_t>& pts, const PhiQuadRule& rule) {
  const auto n = static_cast<long>(pts.size());
  std::vector<PairResult> best(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
  {
    PairResult local;
#pragma omp for schedule(dynamic, 8)
    for (long a = 0; a < n; ++a) {
      const std::size_t ca = pts[static_cast<std::size_t>(a)];
      const double r = g.r(ca / g.n_z);
      const double z = g.z(ca % g.n_z);
      for (long b = a; b < n; ++b) {
        const std::size_t cb = pts[static_cast<std::size_t>(b)];
        const double v = kappa_pair_value(r, z, g.r(cb / g.n_z), g.z(cb % g.n_z), rule);
        // lexicographic tie-break on (a, b)
        if (v < local.value || (v == local.value && (ca < local.a || (ca == local.a && cb < local.b)))) {
          local = {v, ca, cb};
        }
      }
    }
    best[static_cast<std::size_t>(omp_get_thread_num())] = local;
  }
  PairResult out;
  for (const PairResult& p : best)
    if (p.value < out.value || (p.value == out.value && (p.a < out.a || (p.a == out.a && p.b < out.b)))) out = p;
  return out;
}

}  // namespace

KappaEstimate estimate_kappa(const SupportRegion& region, const PhiQuadRule& rule,
                             const KappaSearchSchedule& schedule) {
  if (region.empty()) throw EmptyRegionError("estimate_kappa: empty support region");
  const AxiGrid& g = region.grid;
  if (region.box.r_lo <= schedule.axis_tolerance || region.box.z_lo <= schedule.axis_tolerance)
    throw DomainError("estimate_kappa: region touches the axis or the plane z = 0, kappa degenerates");

  const std::vector<char> mask = region.mask();
  const std::vector<std::size_t> boundary = boundary_cells(region, mask);

  KappaEstimate est;
  est.n_r = g.n_r;
  est.n_z = g.n_z;
  PairResult best;
  for (std::size_t stride : schedule.strides) {
    if (stride == 0) throw ConfigError("estimate_kappa: strides must be positive");
    const auto pts = level_points(region, boundary, stride);
    if (pts.size() > schedule.max_points && !est.history.empty()) continue;
    const PairResult level = search_pairs(g, pts, rule);
    est.history.push_back({stride, pts.size(), level.value});
    if (level.value < best.value) best = level;
  }
  est.value = best.value;
  est.argmin_a = {g.r(best.a / g.n_z), g.z(best.a % g.n_z)};
  est.argmin_b = {g.r(best.b / g.n_z), g.z(best.b % g.n_z)};

  if (schedule.local_refinement) {
    std::array<double, 4> x{est.argmin_a[0], est.argmin_a[1], est.argmin_b[0], est.argmin_b[1]};
    const BoundingBox& box = region.box;
    const auto admissible = [&](const std::array<double, 4>& p) {
      return p[0] >= box.r_lo && p[0] <= box.r_hi && p[2] >= box.r_lo && p[2] <= box.r_hi && p[1] >= box.z_lo &&
             p[1] <= box.z_hi && p[3] >= box.z_lo && p[3] <= box.z_hi && region.covers(p[0], p[1]) &&
             region.covers(p[2], p[3]);
    };
    const auto value_at = [&](const std::array<double, 4>& p) { return kappa_pair_value(p[0], p[1], p[2], p[3], rule); };
    double fx = est.value;
    std::array<double, 4> step{0.5 * g.dr(), 0.5 * g.dz(), 0.5 * g.dr(), 0.5 * g.dz()};
    const double stop_r = schedule.min_step * g.dr();
    int guard = 0;
    while (step[0] > stop_r && guard++ < 10000) {
      bool improved = false;
      for (std::size_t d = 0; d < 4; ++d) {
        for (double sgn : {-1.0, 1.0}) {
          auto trial = x;
          trial[d] += sgn * step[d];
          if (!admissible(trial)) continue;
          const double ft = value_at(trial);
          if (ft < fx) {
            fx = ft;
            x = trial;
            improved = true;
          }
        }
      }
      if (!improved)
        for (double& s : step) s *= 0.5;
    }
    if (fx < est.value) {
      est.value = fx;
      est.argmin_a = {x[0], x[1]};
      est.argmin_b = {x[2], x[3]};
      est.history.push_back({0, 0, fx});
    }
  }
  if (!(est.value > 0.0)) throw NumericalError("estimate_kappa: nonpositive estimate");
  return est;
}

}  // namespace ivse
