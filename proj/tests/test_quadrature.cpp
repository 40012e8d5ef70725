#include <cmath>

#include "doctest.h"
#include "ivse/quadrature.hpp"

using namespace ivse;

// Reference values: mpmath at 30 digits (oracles/kernels.py).
namespace {
const PhiQuadRule& rule32() {
  static const PhiQuadRule r = PhiQuadRule::gauss_legendre(32);
  return r;
}
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("phi rule integrates the s-weight exactly") {
  for (std::size_t order : {16, 24, 32}) {
    const auto rule = PhiQuadRule::gauss_legendre(order);
    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(std::abs(s_integral([](double) { return 1.0; }, rule) - 1.0) < 1e-12);
    CHECK(std::abs(s_integral([](double s) { return s; }, rule) - kPi / 4) < 1e-12);
  }
  CHECK_THROWS_AS(PhiQuadRule::gauss_legendre(0), ConfigError);
}

TEST_CASE("s_integral against the high-precision reference") {
  const double v = s_integral([](double s) { return std::pow(5.0 - 2.0 * s, -1.5); }, rule32());
  CHECK(rel(v, 0.16190031132687785318) < 1e-10);
}

TEST_CASE("s_integral reports the failing node") {
  try {
    (void)s_integral([](double s) { return s > 0.5 ? std::nan("") : 1.0; }, rule32());
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.node() < rule32().order);
  }
}

TEST_CASE("kernels against the high-precision reference") {
  const KernelArgs a{2.0, 1.0, 2.2, 1.3};
  CHECK(rel(kernel_Kr_odd(a, rule32()), -2.5781665333197266841) < 1e-9);
  CHECK(rel(kernel_Kz_full(a, rule32()), 2.0531584604475630831) < 1e-9);
  CHECK(rel(kernel_G(a, rule32()), 0.024603361240040982853) < 1e-9);
  CHECK(rel(kernel_G({2.0, 1.0, 2.0, 1.0}, rule32()), 0.035728577435510402976) < 1e-9);
  CHECK(rel(kernel_G({2.5, 1.5, 2.5, 1.5}, rule32()), 0.010326981620199389993) < 1e-9);

  const KernelArgs b{1.5, 0.4, 2.5, 0.9};
  CHECK(rel(kernel_Kr_odd(b, rule32(), 0.05), -0.80597687910608753062) < 1e-9);
  CHECK(rel(kernel_Kz_full(b, rule32(), 0.05), 0.67592458641589941491) < 1e-9);
}

TEST_CASE("near-coincident arguments stay accurate") {
  CHECK(rel(kernel_Kr_odd({2.0, 1.0, 2.01, 1.005}, rule32()), -40.382683278578114704) < 1e-9);
}

TEST_CASE("vertical kernel on the axis has a closed form") {
  for (double zeta : {0.0, 0.7, -1.9}) {
    const double rb = 1.3;
    const double exact = kPi * rb * rb / std::pow(zeta * zeta + rb * rb, 1.5);
    CHECK(rel(vertical_half_kernel(0.0, rb, zeta, rule32()), exact) < 1e-10);
  }
}

TEST_CASE("kernel symmetries") {
  const double h = radial_half_kernel(1.7, 2.1, 0.6, rule32());
  CHECK(radial_half_kernel(1.7, 2.1, -0.6, rule32()) == -h);
  CHECK(vertical_half_kernel(1.7, 2.1, -0.6, rule32()) == vertical_half_kernel(1.7, 2.1, 0.6, rule32()));
  // with the odd image folded in, the u_r kernel is even in z and the u_z kernel odd
  CHECK(kernel_Kr_odd({2.0, -0.4, 2.2, 1.3}, rule32()) == doctest::Approx(kernel_Kr_odd({2.0, 0.4, 2.2, 1.3}, rule32())).epsilon(1e-14));
  CHECK(kernel_Kz_full({2.0, -0.4, 2.2, 1.3}, rule32()) == doctest::Approx(-kernel_Kz_full({2.0, 0.4, 2.2, 1.3}, rule32())).epsilon(1e-14));
  CHECK(kernel_Kz_full({2.0, 0.0, 2.2, 1.3}, rule32()) == 0.0);
}

TEST_CASE("kernel domain errors") {
  CHECK_THROWS_AS(kernel_Kr_odd({2.0, 1.0, 2.0, 1.0}, rule32()), SingularEvaluationError);
  CHECK_NOTHROW(kernel_Kr_odd({2.0, 1.0, 2.0, 1.0}, rule32(), 0.01));
  CHECK_THROWS_AS(kernel_G({0.0, 1.0, 2.0, 1.0}, rule32()), DomainError);
  CHECK_THROWS_AS(kernel_G({1.0, 0.0, 2.0, 1.0}, rule32()), DomainError);
}

TEST_CASE("kernel_G decreases as the points move away from the plane") {
  double prev = kernel_G({2.0, 0.25, 2.2, 0.25}, rule32());
  for (double z = 0.5; z < 100.0; z *= 2.0) {
    const double g = kernel_G({2.0, z, 2.2, z}, rule32());
    CHECK(g > 0.0);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("printed vertical kernel differs from the implemented one") {
  const KernelArgs a{2.0, 1.0, 2.2, 1.3};
  CHECK(std::abs(kernel_Kz_printed(a, rule32()) - kernel_Kz_full(a, rule32())) > 0.1);
}
