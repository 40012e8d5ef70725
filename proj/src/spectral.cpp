#include "ivse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include <fftw3.h>

namespace ivse {

namespace {

// FFTW planning is not thread-safe; plans are created once per size under a lock
// and executed through the new-array interface on aligned scratch buffers.
struct FftPlans {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit FftPlans(std::size_t size) : n(size) {
    const std::size_t nr = n * n * n;
    const std::size_t nc = n * n * (n / 2 + 1);
    real = fftw_alloc_real(nr);
    spec = fftw_alloc_complex(nc);
    const int ni = static_cast<int>(n);
    forward = fftw_plan_dft_r2c_3d(ni, ni, ni, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_3d(ni, ni, ni, spec, real, FFTW_ESTIMATE);
  }
  ~FftPlans() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

std::mutex g_fft_mutex;

FftPlans& plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<FftPlans>> cache;
  auto& p = cache[n];
  if (!p) p = std::make_unique<FftPlans>(n);
  return *p;
}

// Transforms hold the lock for the whole call: the scratch buffers are shared.
std::vector<Complex> forward_transform(std::size_t n, const std::vector<double>& values) {
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  FftPlans& p = plans_for(n);
  std::copy(values.begin(), values.end(), p.real);
  fftw_execute_dft_r2c(p.forward, p.real, p.spec);
  const std::size_t nc = n * n * (n / 2 + 1);
  const double scale = 1.0 / static_cast<double>(n * n * n);
  std::vector<Complex> out(nc);
  for (std::size_t m = 0; m < nc; ++m) out[m] = Complex(p.spec[m][0], p.spec[m][1]) * scale;
  return out;
}

std::vector<double> backward_transform(std::size_t n, const std::vector<Complex>& coeffs) {
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  FftPlans& p = plans_for(n);
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    p.spec[m][0] = coeffs[m].real();
    p.spec[m][1] = coeffs[m].imag();
  }
  fftw_execute_dft_c2r(p.backward, p.spec, p.real);
  return std::vector<double>(p.real, p.real + n * n * n);
}

void require_same_shape(const SpectralVectorField& a, const SpectralVectorField& b, const char* who) {
  if (a.n() != b.n() || a.length() != b.length()) throw ConfigError(std::string(who) + ": fields live on different boxes");
}

// Visit every stored mode with its frequency vector xi = m / L.
template <typename F>
void for_each_mode(const SpectralVectorField& v, F&& f) {
  const std::size_t n = v.n(), h = v.half();
  const double il = 1.0 / v.length();
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(v.wavenumber(i)) * il;
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = static_cast<double>(v.wavenumber(j)) * il;
      for (std::size_t k = 0; k < h; ++k) {
        const double xk = static_cast<double>(k) * il;
        f(v.index(i, j, k), i, j, k, std::array<double, 3>{xi, xj, xk});
      }
    }
  }
}

double weight(double s, const std::array<double, 3>& xi) {
  const double q = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  return s == 0.0 ? 1.0 : std::pow(1.0 + 4.0 * kPi * kPi * q, s);
}

bool dealiased(const SpectralVectorField& v, std::size_t i, std::size_t j, std::size_t k) {
  const long cut = static_cast<long>(v.n() / 3);
  return std::abs(v.wavenumber(i)) <= cut && std::abs(v.wavenumber(j)) <= cut && static_cast<long>(k) <= cut;
}

SpectralVectorField truncate(const SpectralVectorField& v) {
  SpectralVectorField out = v;
  for_each_mode(v, [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k, const std::array<double, 3>&) {
    if (!dealiased(v, i, j, k))
      for (auto& c : out.coeffs) c[m] = 0.0;
  });
  return out;
}

double sampled_bilinear(const AxiScalarField& f, double r, double z) {
  // odd continuation below the plane
  const double sign = z < 0.0 ? -1.0 : 1.0;
  z = std::abs(z);
  const AxiGrid& g = f.grid;
  const double x = (r - g.r_min) / g.dr() - 0.5;
  const double y = (z - g.z_min) / g.dz() - 0.5;
  if (x < -0.5 || y < -0.5 || x > static_cast<double>(g.n_r) - 0.5 || y > static_cast<double>(g.n_z) - 0.5) return 0.0;
  const auto at = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= static_cast<long>(g.n_r) || j >= static_cast<long>(g.n_z)) return 0.0;
    return f.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  const long i0 = static_cast<long>(std::floor(x)), j0 = static_cast<long>(std::floor(y));
  const double a = x - static_cast<double>(i0), b = y - static_cast<double>(j0);
  return sign * ((1 - a) * (1 - b) * at(i0, j0) + a * (1 - b) * at(i0 + 1, j0) + (1 - a) * b * at(i0, j0 + 1) +
                 a * b * at(i0 + 1, j0 + 1));
}

template <typename Sampler>
SpectralVectorField embed_raw(double length, std::size_t n, double r_hi, double z_hi, Sampler&& omega_theta) {
  if (r_hi > 0.25 * length || z_hi > 0.25 * length)
    throw DomainError("embed: support must keep a margin of L/4 from the box faces");
  PhysicalVector v;
  for (auto& c : v) c.assign(n * n * n, 0.0);
  SpectralVectorField shape(length, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = shape.coordinate(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double y = shape.coordinate(j);
      const double r = std::hypot(x, y);
      if (r == 0.0 || r > r_hi) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const double w = omega_theta(r, shape.coordinate(k));
        if (w == 0.0) continue;
        const std::size_t p = (i * n + j) * n + k;
        v[0][p] = -w * y / r;
        v[1][p] = w * x / r;
      }
    }
  }
  return SpectralVectorField::from_physical(length, n, v);
}

SpectralVectorField strip_nyquist(SpectralVectorField v) {
  for_each_mode(v, [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k, const std::array<double, 3>&) {
    if (v.is_nyquist(i, j, k))
      for (auto& c : v.coeffs) c[m] = 0.0;
  });
  return v;
}

}  // namespace

SpectralVectorField::SpectralVectorField(double length, std::size_t n) : length_(length), n_(n) {
  if (!(length > 0.0)) throw ConfigError("SpectralVectorField: box length must be positive");
  if (n < 2 || n % 2 != 0) throw ConfigError("SpectralVectorField: resolution must be even and >= 2");
  for (auto& c : coeffs) c.assign(modes(), Complex(0.0, 0.0));
}

SpectralVectorField SpectralVectorField::from_physical(double length, std::size_t n, const PhysicalVector& values) {
  SpectralVectorField v(length, n);
  for (std::size_t c = 0; c < 3; ++c) {
    if (values[c].size() != n * n * n) throw ConfigError("from_physical: wrong sample count");
    v.coeffs[c] = forward_transform(n, values[c]);
  }
  return v;
}

PhysicalVector SpectralVectorField::to_physical() const {
  PhysicalVector out;
  for (std::size_t c = 0; c < 3; ++c) out[c] = backward_transform(n_, coeffs[c]);
  return out;
}

double SpectralVectorField::divergence_residual() const {
  double num = 0.0, den = 0.0;
  for_each_mode(*this, [&](std::size_t m, std::size_t, std::size_t, std::size_t k, const std::array<double, 3>& xi) {
    const Complex d = xi[0] * coeffs[0][m] + xi[1] * coeffs[1][m] + xi[2] * coeffs[2][m];
    const double q = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    const double mult = multiplicity(k);
    num += mult * std::norm(d);
    den += mult * q * (std::norm(coeffs[0][m]) + std::norm(coeffs[1][m]) + std::norm(coeffs[2][m]));
  });
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

SpectralVectorField& SpectralVectorField::operator+=(const SpectralVectorField& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t m = 0; m < modes(); ++m) coeffs[c][m] += other.coeffs[c][m];
  return *this;
}

SpectralVectorField& SpectralVectorField::operator-=(const SpectralVectorField& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t m = 0; m < modes(); ++m) coeffs[c][m] -= other.coeffs[c][m];
  return *this;
}

SpectralVectorField& SpectralVectorField::operator*=(double a) {
  for (auto& comp : coeffs)
    for (auto& c : comp) c *= a;
  return *this;
}

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) { return a += b; }
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) { return a -= b; }
SpectralVectorField operator*(double s, SpectralVectorField a) { return a *= s; }

SpectralVectorField helmholtz_project(const SpectralVectorField& v) {
  SpectralVectorField out = v;
  for_each_mode(v, [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k, const std::array<double, 3>& xi) {
    if (i == 0 && j == 0 && k == 0) return;
    if (v.is_nyquist(i, j, k)) {
      for (auto& c : out.coeffs) c[m] = 0.0;
      return;
    }
    const double q = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    const Complex d = (xi[0] * v.coeffs[0][m] + xi[1] * v.coeffs[1][m] + xi[2] * v.coeffs[2][m]) / q;
    for (std::size_t c = 0; c < 3; ++c) out.coeffs[c][m] = v.coeffs[c][m] - xi[c] * d;
  });
  return out;
}

SpectralVectorField biot_savart_3d(const SpectralVectorField& omega) {
  double total = 0.0;
  for (const auto& comp : omega.coeffs)
    for (const auto& c : comp) total = std::max(total, std::abs(c));
  const double mean = std::abs(omega.coeffs[0][0]) + std::abs(omega.coeffs[1][0]) + std::abs(omega.coeffs[2][0]);
  if (mean > 1e-12 * std::max(total, 1e-300) && mean > 0.0)
    throw DomainError("biot_savart_3d: vorticity has nonzero mean");
  SpectralVectorField u(omega.length(), omega.n());
  // u_hat = 2 pi i xi x omega_hat / (4 pi^2 |xi|^2)
  for_each_mode(omega, [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k, const std::array<double, 3>& xi) {
    if ((i == 0 && j == 0 && k == 0) || omega.is_nyquist(i, j, k)) return;
    const double q = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    const Complex f = Complex(0.0, 1.0) / (2.0 * kPi * q);
    const Complex w0 = omega.coeffs[0][m], w1 = omega.coeffs[1][m], w2 = omega.coeffs[2][m];
    u.coeffs[0][m] = f * (xi[1] * w2 - xi[2] * w1);
    u.coeffs[1][m] = f * (xi[2] * w0 - xi[0] * w2);
    u.coeffs[2][m] = f * (xi[0] * w1 - xi[1] * w0);
  });
  return u;
}

double hs_inner(const SpectralVectorField& a, const SpectralVectorField& b, double s) {
  require_same_shape(a, b, "hs_inner");
  std::vector<double> terms(a.modes());
  for_each_mode(a, [&](std::size_t m, std::size_t, std::size_t, std::size_t k, const std::array<double, 3>& xi) {
    double acc = 0.0;
    for (std::size_t c = 0; c < 3; ++c) acc += (a.coeffs[c][m] * std::conj(b.coeffs[c][m])).real();
    terms[m] = a.multiplicity(k) * weight(s, xi) * acc;
  });
  const double L = a.length();
  return L * L * L * pairwise_sum(terms);
}

double hs_norm(const SpectralVectorField& v, double s) { return std::sqrt(std::max(0.0, hs_inner(v, v, s))); }

double gradient_hs_norm(const SpectralVectorField& u, double s) {
  std::vector<double> terms(u.modes());
  for_each_mode(u, [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k, const std::array<double, 3>& xi) {
    if (u.is_nyquist(i, j, k)) {
      terms[m] = 0.0;
      return;
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t d = 0; d < 3; ++d) acc += std::norm(2.0 * kPi * xi[d] * u.coeffs[c][m]);
    terms[m] = u.multiplicity(k) * weight(s, xi) * acc;
  });
  const double L = u.length();
  return std::sqrt(L * L * L * pairwise_sum(terms));
}

double scalar_hs_norm(double length, std::size_t n, const std::vector<double>& f, double s) {
  SpectralVectorField v(length, n);
  v.coeffs[0] = forward_transform(n, f);
  return hs_norm(v, s);
}

SpectralVectorField bilinear_B(const SpectralVectorField& a, const SpectralVectorField& b) {
  require_same_shape(a, b, "bilinear_B");
  if (a.n() < 8) throw DomainError("bilinear_B: resolution too small after dealiasing");
  const std::size_t n = a.n(), np = n * n * n;
  const bool same = &a == &b;
  const SpectralVectorField at = truncate(a);

  // (x . grad) u_y accumulated in physical space, one velocity-gradient
  // component at a time to keep memory at a few scalar fields.
  const auto transport = [&](const SpectralVectorField& x, const SpectralVectorField& y, PhysicalVector& acc) {
    const PhysicalVector xp = x.to_physical();
    const SpectralVectorField uy = biot_savart_3d(y);
    for (std::size_t d = 0; d < 3; ++d) {
      for (std::size_t c = 0; c < 3; ++c) {
        std::vector<Complex> deriv(uy.modes());
        for_each_mode(uy, [&](std::size_t m, std::size_t, std::size_t, std::size_t, const std::array<double, 3>& xi) {
          deriv[m] = Complex(0.0, 2.0 * kPi * xi[d]) * uy.coeffs[c][m];
        });
        const std::vector<double> g = backward_transform(n, deriv);
        for (std::size_t p = 0; p < np; ++p) acc[c][p] += xp[d][p] * g[p];
      }
    }
  };

  PhysicalVector acc;
  for (auto& c : acc) c.assign(np, 0.0);
  if (same) {
    transport(at, at, acc);
  } else {
    const SpectralVectorField bt = truncate(b);
    transport(at, bt, acc);
    transport(bt, at, acc);
  }
  const double half = same ? 1.0 : 0.5;
  for (auto& c : acc)
    for (double& v : c) v *= half;
  return helmholtz_project(truncate(SpectralVectorField::from_physical(a.length(), n, acc)));
}

SpectralVectorField embed_axisymmetric(const AxiScalarField& f, double length, std::size_t n) {
  const GeometryReport geo = validate_geometry(f);
  if (!geo.support_box) return SpectralVectorField(length, n);
  const AxiGrid& g = f.grid;
  const double r_hi = geo.support_box->r_hi + g.dr(), z_hi = geo.support_box->z_hi + g.dz();
  return strip_nyquist(helmholtz_project(embed_raw(length, n, r_hi, z_hi, [&](double r, double z) { return sampled_bilinear(f, r, z); })));
}

SpectralVectorField embed_profile(const RingProfile& p, double length, std::size_t n) {
  return strip_nyquist(helmholtz_project(
      embed_raw(length, n, p.r_c + p.rho_r, p.z_c + p.rho_z, [&](double r, double z) { return p.odd(r, z); })));
}

EmbedDiagnostics embed_profile_diagnostics(const RingProfile& p, double length, std::size_t n) {
  const SpectralVectorField raw =
      strip_nyquist(embed_raw(length, n, p.r_c + p.rho_r, p.z_c + p.rho_z, [&](double r, double z) { return p.odd(r, z); }));
  return {raw.divergence_residual(), helmholtz_project(raw).divergence_residual()};
}

std::array<AxiScalarField, 3> meridian_pullback(const SpectralVectorField& v, const AxiGrid& grid) {
  const std::size_t n = v.n(), h = v.half();
  const double L = v.length();
  const double x0 = -0.5 * L;  // lattice origin: x = x0 + i L / n
  std::array<AxiScalarField, 3> out{AxiScalarField(grid), AxiScalarField(grid), AxiScalarField(grid)};
  // phase factor for coordinate x along an axis: exp(2 pi i m (x - x0) / L)
  const auto phases = [&](double x, std::size_t count, bool full) {
    std::vector<Complex> e(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double m = full ? static_cast<double>(v.wavenumber(i)) : static_cast<double>(i);
      e[i] = std::polar(1.0, 2.0 * kPi * m * (x - x0) / L);
    }
    return e;
  };
  const std::vector<Complex> ey = phases(0.0, n, true);
  std::vector<std::vector<Complex>> ex(grid.n_r), ez(grid.n_z);
  for (std::size_t a = 0; a < grid.n_r; ++a) ex[a] = phases(grid.r(a), n, true);
  for (std::size_t b = 0; b < grid.n_z; ++b) ez[b] = phases(grid.z(b), h, false);

  for (std::size_t c = 0; c < 3; ++c) {
    // sum over m_y at y = 0, then over m_x at each r; the m_z sum runs on the half
    // spectrum with real part doubling (Nyquist planes are discarded).
    std::vector<Complex> s1(n * h, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (2 * i == n || 2 * j == n) continue;
        for (std::size_t k = 0; k + 1 < h; ++k) s1[i * h + k] += v.coeffs[c][v.index(i, j, k)] * ey[j];
      }
#pragma omp parallel for schedule(static)
    for (long al = 0; al < static_cast<long>(grid.n_r); ++al) {
      const auto a = static_cast<std::size_t>(al);
      std::vector<Complex> s2(h, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k + 1 < h; ++k) s2[k] += s1[i * h + k] * ex[a][i];
      for (std::size_t b = 0; b < grid.n_z; ++b) {
        double val = s2[0].real();
        for (std::size_t k = 1; k + 1 < h; ++k) val += 2.0 * (s2[k] * ez[b][k]).real();
        out[c].at(a, b) = val;
      }
    }
  }
  return out;
}

namespace {

std::vector<double> gaussian_noise(std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> out(count);
  for (double& x : out) x = nd(rng);
  return out;
}

SpectralVectorField smooth_random(double length, std::size_t n, std::uint64_t seed, double k0) {
  std::mt19937_64 rng(seed);
  PhysicalVector p;
  for (auto& c : p) c = gaussian_noise(n * n * n, rng);
  SpectralVectorField v = SpectralVectorField::from_physical(length, n, p);
  for_each_mode(v, [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k, const std::array<double, 3>&) {
    const double q = static_cast<double>(v.wavenumber(i) * v.wavenumber(i) + v.wavenumber(j) * v.wavenumber(j) +
                                         static_cast<long>(k * k));
    const double f = (v.is_nyquist(i, j, k) || m == 0) ? 0.0 : std::exp(-q / (2.0 * k0 * k0));
    for (auto& c : v.coeffs) c[m] *= f;
  });
  return v;
}

}  // namespace

SpectralVectorField random_field(double length, std::size_t n, std::uint64_t seed, double k0) {
  SpectralVectorField v = smooth_random(length, n, seed, k0);
  const double norm = hs_norm(v, 0.0);
  return norm > 0.0 ? (1.0 / norm) * v : v;
}

SpectralVectorField random_divergence_free(double length, std::size_t n, std::uint64_t seed, double k0) {
  SpectralVectorField v = helmholtz_project(smooth_random(length, n, seed, k0));
  const double norm = hs_norm(v, 0.0);
  return norm > 0.0 ? (1.0 / norm) * v : v;
}

std::vector<double> random_scalar(double length, std::size_t n, std::uint64_t seed, double k0) {
  const SpectralVectorField v = smooth_random(length, n, seed, k0);
  return backward_transform(n, v.coeffs[0]);
}

SpectralVectorField taylor_green_vorticity(double length, std::size_t n, double amplitude) {
  // omega = curl u for u = A (sin X cos Y cos Z, -cos X sin Y cos Z, 0), k = 2 pi / L:
  //   omega = A k (-cos X sin Y sin Z, -sin X cos Y sin Z, 2 sin X sin Y cos Z)
  const double k = 2.0 * kPi / length;
  PhysicalVector p;
  for (auto& c : p) c.assign(n * n * n, 0.0);
  const SpectralVectorField shape(length, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        const double X = k * shape.coordinate(i), Y = k * shape.coordinate(j), Z = k * shape.coordinate(l);
        const std::size_t q = (i * n + j) * n + l;
        p[0][q] = -amplitude * k * std::cos(X) * std::sin(Y) * std::sin(Z);
        p[1][q] = -amplitude * k * std::sin(X) * std::cos(Y) * std::sin(Z);
        p[2][q] = 2.0 * amplitude * k * std::sin(X) * std::sin(Y) * std::cos(Z);
      }
  return SpectralVectorField::from_physical(length, n, p);
}

BilinearConstant measure_bilinear_constant(double length, std::size_t n, double s, std::size_t pairs,
                                           std::uint64_t seed, const std::vector<SpectralVectorField>& extra) {
  BilinearConstant out;
  const auto ratio = [&](const SpectralVectorField& a, const SpectralVectorField& b) {
    const double den = hs_norm(a, s) * hs_norm(b, s);
    return den > 0.0 ? hs_norm(bilinear_B(a, b), s) / den : 0.0;
  };
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto a = random_divergence_free(length, n, seed + 2 * p);
    const auto b = random_divergence_free(length, n, seed + 2 * p + 1);
    out.ratios.push_back(ratio(a, b));
  }
  for (const auto& e : extra) out.ratios.push_back(ratio(e, e));
  if (!out.ratios.empty()) {
    out.max_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
    out.min_ratio = *std::min_element(out.ratios.begin(), out.ratios.end());
  }
  return out;
}

PicardReport picard_solve(const SpectralVectorField& omega0, double s, double T, std::size_t substeps,
                          std::size_t max_iter, double tol) {
  if (!(T > 0.0) || substeps == 0) throw ConfigError("picard_solve: need T > 0 and at least one substep");
  PicardReport rep;
  rep.initial_norm = hs_norm(omega0, s);
  const double h = T / static_cast<double>(substeps);
  std::vector<SpectralVectorField> w(substeps + 1, omega0);
  std::size_t above = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<SpectralVectorField> b;
    b.reserve(w.size());
    for (const auto& x : w) b.push_back(bilinear_B(x, x));
    std::vector<SpectralVectorField> next(w.size(), omega0);
    SpectralVectorField integral(omega0.length(), omega0.n());
    for (std::size_t q = 1; q <= substeps; ++q) {
      integral += (0.5 * h) * (b[q - 1] + b[q]);
      next[q] = omega0 + integral;
    }
    double dist = 0.0;
    for (std::size_t q = 0; q <= substeps; ++q) dist = std::max(dist, hs_norm(next[q] - w[q], s));
    rep.distances.push_back(dist);
    if (rep.distances.size() >= 2) {
      const double prev = rep.distances[rep.distances.size() - 2];
      const double ratio = prev > 0.0 ? dist / prev : 0.0;
      rep.ratios.push_back(ratio);
      above = ratio >= 1.0 ? above + 1 : 0;
      if (above >= 3) rep.non_contraction = true;
    }
    w = std::move(next);
    rep.iterations = it + 1;
    if (dist <= tol * std::max(rep.initial_norm, 1e-300) || dist == 0.0) {
      rep.converged = true;
      break;
    }
  }
  rep.final_norm = hs_norm(w.back(), s);
  for (const auto& x : w) rep.max_norm = std::max(rep.max_norm, hs_norm(x, s));
  rep.trajectory = std::move(w);
  return rep;
}

}  // namespace ivse
