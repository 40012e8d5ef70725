#include "ivse/quadrature.hpp"

#include <algorithm>
#include <array>

namespace ivse {

namespace {

constexpr double kHalfPi = kPi / 2.0;

// Peak half-width (in phi) below which the base rule is replaced by panels
// graded geometrically toward phi = 0. Chosen so a 32-point rule on a single
// panel is accurate to ~1e-12 for widths above it.
constexpr double kGradeWidth = 0.35;
constexpr double kGradeRatio = 3.0;

inline double inv_pow32(double x) { return 1.0 / (x * std::sqrt(x)); }

// Calls f(phi_weight, cos phi, 2 sin^2(phi/2), 2 cos^2(phi/2), node_index) over
// the rule, possibly split into graded panels. Returns the weighted sum.
template <typename F>
double phi_integral(F&& f, const PhiQuadRule& rule, double width) {
  double acc = 0.0;
  if (!(width < kGradeWidth)) {
    for (std::size_t i = 0; i < rule.order; ++i) {
      const double phi = rule.nodes[i];
      const double c = std::cos(phi);
      const double sh = std::sin(0.5 * phi);
      const double ch = std::cos(0.5 * phi);
      const double v = f(c, 2.0 * sh * sh, 2.0 * ch * ch);
      if (!std::isfinite(v)) throw EvaluationError("kernel quadrature: non-finite integrand", i);
      acc += rule.weights[i] * v;
    }
    return acc;
  }
  double a = 0.0;
  double b = std::max(width, 1e-300);
  std::size_t panel = 0;
  while (a < kHalfPi) {
    if (b > kHalfPi || kHalfPi - b < 0.5 * (b - a)) b = kHalfPi;
    const double scale = (b - a) / kHalfPi;
    for (std::size_t i = 0; i < rule.order; ++i) {
      const double phi = a + scale * rule.nodes[i];
      const double c = std::cos(phi);
      const double sh = std::sin(0.5 * phi);
      const double ch = std::cos(0.5 * phi);
      const double v = f(c, 2.0 * sh * sh, 2.0 * ch * ch);
      if (!std::isfinite(v))
        throw EvaluationError("kernel quadrature: non-finite integrand", panel * rule.order + i);
      acc += scale * rule.weights[i] * v;
    }
    a = b;
    b = (b == 0.0 ? width : b * kGradeRatio);
    ++panel;
  }
  return acc;
}

inline double peak_width(double c0, double r, double r_src) {
  const double rr = r * r_src;
  if (rr <= 0.0) return kHalfPi;  // no azimuthal peak on the axis
  return std::sqrt(c0 / rr);
}

}  // namespace

PhiQuadRule PhiQuadRule::gauss_legendre(std::size_t order) {
  if (order < 1) throw ConfigError("quadrature: rule order must be >= 1");
  PhiQuadRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const auto n = static_cast<double>(order);
  const std::size_t m = (order + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> (0, pi/2)
    rule.nodes[i] = kHalfPi * 0.5 * (1.0 - x);
    rule.nodes[order - 1 - i] = kHalfPi * 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[order - 1 - i] = kHalfPi * 0.5 * w;
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());
  return rule;
}

double radial_half_kernel(double r, double r_src, double zeta, const PhiQuadRule& rule, double delta) {
  const double dr = r - r_src;
  const double c0 = zeta * zeta + dr * dr + delta * delta;
  if (zeta == 0.0) return 0.0;  // odd in zeta
  if (c0 <= 0.0) throw SingularEvaluationError("radial kernel: coincident points without regularization");
  const double b = r * r_src;
  const double integral = phi_integral(
      [&](double c, double s2, double c2) { return c * (inv_pow32(c0 + 2.0 * b * s2) - inv_pow32(c0 + 2.0 * b * c2)); },
      rule, peak_width(c0, r, r_src));
  return r_src * zeta * integral;
}

double vertical_half_kernel(double r, double r_src, double zeta, const PhiQuadRule& rule, double delta) {
  const double dr = r - r_src;
  const double c0 = zeta * zeta + dr * dr + delta * delta;
  if (c0 <= 0.0) throw SingularEvaluationError("vertical kernel: coincident points without regularization");
  const double b = r * r_src;
  const double integral = phi_integral(
      [&](double c, double s2, double c2) {
        return (r_src - r * c) * inv_pow32(c0 + 2.0 * b * s2) + (r_src + r * c) * inv_pow32(c0 + 2.0 * b * c2);
      },
      rule, peak_width(c0, r, r_src));
  return r_src * integral;
}

namespace {

void require_coincidence_guard(const KernelArgs& a, double delta) {
  if (delta == 0.0 && a.r == a.r_src && a.z == a.z_src)
    throw SingularEvaluationError("kernel: coincident target and source without regularization");
}

}  // namespace

double kernel_Kr_odd(const KernelArgs& a, const PhiQuadRule& rule, double delta) {
  require_coincidence_guard(a, delta);
  return radial_half_kernel(a.r, a.r_src, a.z - a.z_src, rule, delta) -
         radial_half_kernel(a.r, a.r_src, a.z + a.z_src, rule, delta);
}

double kernel_Kz_full(const KernelArgs& a, const PhiQuadRule& rule, double delta) {
  require_coincidence_guard(a, delta);
  return vertical_half_kernel(a.r, a.r_src, a.z - a.z_src, rule, delta) -
         vertical_half_kernel(a.r, a.r_src, a.z + a.z_src, rule, delta);
}

double kernel_Kz_printed(const KernelArgs& a, const PhiQuadRule& rule, double delta) {
  require_coincidence_guard(a, delta);
  const double zm = a.z - a.z_src;
  const double zp = a.z + a.z_src;
  return zm * vertical_half_kernel(a.r, a.r_src, zm, rule, delta) -
         zp * vertical_half_kernel(a.r, a.r_src, zp, rule, delta);
}

double kernel_G(const KernelArgs& a, const PhiQuadRule& rule) {
  if (!(a.r > 0.0 && a.r_src > 0.0 && a.z > 0.0 && a.z_src > 0.0))
    throw DomainError("kernel_G: all coordinates must be positive");
  const double zeta = a.z + a.z_src;
  const double value = radial_half_kernel(a.r, a.r_src, zeta, rule, 0.0) / (a.r * a.r_src * a.r_src);
  if (!(value > 0.0)) throw NumericalError("kernel_G: nonpositive value, quadrature is broken");
  return value;
}

}  // namespace ivse
