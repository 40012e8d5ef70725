#include "ivse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ivse {

namespace {

Check make_check(std::string name, double value, double limit) {
  return {std::move(name), value, limit, std::isfinite(value) && value <= limit};
}

std::string label(const char* base, double s) {
  std::ostringstream os;
  os << base << " s=" << s;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SpectralVectorField sampled(double length, std::size_t n, const std::function<std::array<double, 3>(double, double, double)>& f) {
  PhysicalVector p;
  for (auto& c : p) c.assign(n * n * n, 0.0);
  const SpectralVectorField shape(length, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const auto v = f(shape.coordinate(i), shape.coordinate(j), shape.coordinate(k));
        for (std::size_t c = 0; c < 3; ++c) p[c][(i * n + j) * n + k] = v[c];
      }
  return SpectralVectorField::from_physical(length, n, p);
}

}  // namespace

nlohmann::json to_json(const std::vector<Check>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Check& c : checks) arr.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  return arr;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<Check> isometry_checks(const OracleSuiteConfig& config) {
  std::vector<Check> out;
  for (double s : config.s_values) {
    double worst = 0.0;
    for (std::size_t f = 0; f < config.fields; ++f) {
      const auto w = random_divergence_free(config.length, config.n, config.seed + f);
      worst = std::max(worst, rel(gradient_hs_norm(biot_savart_3d(w), s), hs_norm(w, s)));
    }
    out.push_back(make_check(label("isometry |grad u| vs |omega|", s), worst, config.tolerance));
  }
  return out;
}

std::vector<Check> helmholtz_checks(const OracleSuiteConfig& config) {
  std::vector<Check> out;
  for (double s : config.s_values) {
    double idem = 0.0, orth = 0.0, pyth = 0.0, keep = 0.0, kill = 0.0;
    for (std::size_t f = 0; f < config.fields; ++f) {
      const auto v = random_field(config.length, config.n, config.seed + 1000 + f);
      const auto pv = helmholtz_project(v);
      const auto qv = v - pv;
      const double npv = hs_norm(pv, s), nqv = hs_norm(qv, s), nv = hs_norm(v, s);
      idem = std::max(idem, hs_norm(helmholtz_project(pv) - pv, s) / npv);
      orth = std::max(orth, std::abs(hs_inner(pv, qv, s)) / (npv * nqv));
      pyth = std::max(pyth, std::abs(nv * nv - npv * npv - nqv * nqv) / (nv * nv));
      // a divergence-free field is fixed, a pure gradient is annihilated
      const auto d = random_divergence_free(config.length, config.n, config.seed + 2000 + f);
      keep = std::max(keep, hs_norm(helmholtz_project(d) - d, s) / hs_norm(d, s));
      kill = std::max(kill, hs_norm(helmholtz_project(qv), s) / nqv);
    }
    out.push_back(make_check(label("helmholtz idempotence", s), idem, config.tolerance));
    out.push_back(make_check(label("helmholtz orthogonality", s), orth, config.tolerance));
    out.push_back(make_check(label("helmholtz pythagoras", s), pyth, config.tolerance));
    out.push_back(make_check(label("helmholtz fixes divergence-free", s), keep, 1e-13));
    out.push_back(make_check(label("helmholtz annihilates gradients", s), kill, 1e-13));
  }
  return out;
}

std::vector<Check> biot_savart_checks(const OracleSuiteConfig& config) {
  std::vector<Check> out;
  const double L = config.length, k = 2.0 * kPi / L, A = 0.7;
  const auto w = taylor_green_vorticity(L, config.n, A);
  const auto u_exact = sampled(L, config.n, [&](double x, double y, double z) {
    return std::array<double, 3>{A * std::sin(k * x) * std::cos(k * y) * std::cos(k * z),
                                 -A * std::cos(k * x) * std::sin(k * y) * std::cos(k * z), 0.0};
  });
  const auto u = biot_savart_3d(w);
  out.push_back(make_check("biot-savart single mode", hs_norm(u - u_exact, 0.0) / hs_norm(u_exact, 0.0), 1e-13));
  out.push_back(make_check("biot-savart zero field", hs_norm(biot_savart_3d(SpectralVectorField(L, config.n)), 0.0), 0.0));
  double div = 0.0;
  for (std::size_t f = 0; f < config.fields; ++f)
    div = std::max(div, biot_savart_3d(random_divergence_free(L, config.n, config.seed + 3000 + f)).divergence_residual());
  out.push_back(make_check("biot-savart output divergence", div, config.tolerance));
  // Parseval
  const auto v = random_field(L, config.n, config.seed + 4000);
  const PhysicalVector p = v.to_physical();
  double sum = 0.0;
  for (const auto& c : p)
    for (double x : c) sum += x * x;
  const double cell = std::pow(L / static_cast<double>(config.n), 3);
  out.push_back(make_check("parseval s=0", rel(hs_norm(v, 0.0), std::sqrt(sum * cell)), 1e-13));
  return out;
}

std::vector<Check> bilinear_checks(const OracleSuiteConfig& config) {
  std::vector<Check> out;
  double sym = 0.0, div = 0.0;
  std::vector<double> ratios;
  for (std::size_t f = 0; f < config.fields; ++f) {
    const auto a = random_divergence_free(config.length, config.n, config.seed + 5000 + 2 * f);
    const auto b = random_divergence_free(config.length, config.n, config.seed + 5001 + 2 * f);
    const auto ab = bilinear_B(a, b);
    const auto ba = bilinear_B(b, a);
    sym = std::max(sym, hs_norm(ab - ba, config.s) / hs_norm(ab, config.s));
    div = std::max(div, ab.divergence_residual());
    ratios.push_back(hs_norm(ab, config.s) / (hs_norm(a, config.s) * hs_norm(b, config.s)));
  }
  out.push_back(make_check("bilinear symmetry", sym, 1e-13));
  out.push_back(make_check("bilinear output divergence", div, config.tolerance));
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  // no reference constant exists; stability means the spread stays within a decade
  out.push_back(make_check("bilinear constant spread max/min", *mx / *mn, 10.0));

  std::vector<double> alg;
  for (std::size_t f = 0; f < config.fields; ++f) {
    const auto g1 = random_scalar(config.length, config.n, config.seed + 6000 + 2 * f);
    const auto g2 = random_scalar(config.length, config.n, config.seed + 6001 + 2 * f);
    std::vector<double> prod(g1.size());
    for (std::size_t q = 0; q < g1.size(); ++q) prod[q] = g1[q] * g2[q];
    alg.push_back(scalar_hs_norm(config.length, config.n, prod, config.s) /
                  (scalar_hs_norm(config.length, config.n, g1, config.s) * scalar_hs_norm(config.length, config.n, g2, config.s)));
  }
  const auto [amn, amx] = std::minmax_element(alg.begin(), alg.end());
  out.push_back(make_check("algebra ratio spread max/min", *amx / *amn, 10.0));
  return out;
}

PicardSuiteResult picard_checks(const OracleSuiteConfig& config) {
  PicardSuiteResult res;
  const std::size_t n = config.picard_n;
  const auto w0 = taylor_green_vorticity(config.length, n, 0.1);
  res.datum_norm = hs_norm(w0, config.s);
  const BilinearConstant c = measure_bilinear_constant(config.length, n, config.s, config.fields, config.seed + 7000, {w0});
  res.bilinear_constant = c.max_ratio;
  res.T = 0.5 / (4.0 * res.bilinear_constant * res.datum_norm);
  res.contraction_bound = 4.0 * res.bilinear_constant * res.datum_norm * res.T;
  res.report = picard_solve(w0, config.s, res.T, config.picard_substeps, config.picard_max_iter, config.picard_tol);

  const PicardReport& r = res.report;
  double worst_ratio = 0.0, growth = 0.0, div = 0.0;
  for (std::size_t k = 0; k < r.ratios.size(); ++k) {
    // ratios near the convergence floor are roundoff, not contraction
    if (r.distances[k + 1] <= 1e3 * config.picard_tol * r.initial_norm) break;
    worst_ratio = std::max(worst_ratio, r.ratios[k]);
    if (k > 0) growth = std::max(growth, r.ratios[k] / r.ratios[k - 1]);
  }
  for (const auto& x : r.trajectory) div = std::max(div, x.divergence_residual());
  res.checks.push_back(make_check("picard converged (1 = no)", r.converged ? 0.0 : 1.0, 0.0));
  res.checks.push_back(make_check("picard max distance ratio vs 4 C |w0| T", worst_ratio, res.contraction_bound));
  // geometric decay: successive ratios do not grow (allow roundoff)
  res.checks.push_back(make_check("picard ratio growth", growth, 1.0 + 1e-6));
  res.checks.push_back(make_check("picard final norm / initial", r.final_norm / r.initial_norm, 2.0));
  res.checks.push_back(make_check("picard iterate divergence", div, config.tolerance));

  const auto zero = picard_solve(SpectralVectorField(config.length, n), config.s, res.T, 4, 5, config.picard_tol);
  res.checks.push_back(make_check("picard zero datum iterations", static_cast<double>(zero.iterations), 1.0));
  return res;
}

std::vector<Check> embed_checks(const OracleSuiteConfig& config) {
  std::vector<Check> out;
  if (config.ring_n == 0) return out;
  const RingProfile ring;
  const auto w = embed_profile(ring, config.ring_box, config.ring_n);
  out.push_back(make_check("embed divergence after projection", w.divergence_residual(), 1e-10));
  // axisymmetric L^2: 2 pi int int |w|^2 r dr dz over both halves, on a fine meridian grid
  const double pad = 0.05;
  const AxiGrid g = AxiGrid::make(ring.r_c - ring.rho_r - pad, ring.r_c + ring.rho_r + pad, ring.z_c - ring.rho_z - pad,
                                  ring.z_c + ring.rho_z + pad, 256, 256);
  const auto f = make_vortex_ring_pair(ring, g);
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.n_r; ++i)
    for (std::size_t j = 0; j < g.n_z; ++j) terms[g.index(i, j)] = f.at(i, j) * f.at(i, j) * g.r(i);
  const double axi = std::sqrt(4.0 * kPi * pairwise_sum(terms) * g.cell_area());
  out.push_back(make_check("embed L2 vs axisymmetric formula", rel(hs_norm(w, 0.0), axi), 0.01));
  out.push_back(make_check("embed zero field", hs_norm(embed_profile(RingProfile{2, 1, 0.5, 0.5, 0.0}, config.ring_box, 16), 0.0), 0.0));
  return out;
}

std::vector<Check> run_oracle_suite(const OracleSuiteConfig& config) {
  std::vector<Check> all;
  for (auto part : {isometry_checks(config), helmholtz_checks(config), biot_savart_checks(config),
                    bilinear_checks(config), picard_checks(config).checks, embed_checks(config)})
    all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace ivse
