"""Reference values for the meridian kernels and the ring-pair functional.

Independent of the C++ code: mpmath adaptive quadrature at 30 digits for the
azimuthal integrals, scipy adaptive cubature for Q. Run with python3; the
printed numbers are frozen in the unit tests.
"""
import mpmath as mp
from scipy import integrate
import math

mp.mp.dps = 30


def D(r, rb, zeta, delta, sign, phi):
    return zeta**2 + r**2 + rb**2 + delta**2 + sign * 2 * r * rb * mp.cos(phi)


def radial_half(r, rb, zeta, delta=0):
    f = lambda p: mp.cos(p) * (D(r, rb, zeta, delta, -1, p) ** -1.5 - D(r, rb, zeta, delta, +1, p) ** -1.5)
    return rb * zeta * mp.quad(f, [0, mp.pi / 4, mp.pi / 2])


def vertical_half(r, rb, zeta, delta=0):
    f = lambda p: ((rb - r * mp.cos(p)) * D(r, rb, zeta, delta, -1, p) ** -1.5
                   + (rb + r * mp.cos(p)) * D(r, rb, zeta, delta, +1, p) ** -1.5)
    return rb * mp.quad(f, [0, mp.pi / 4, mp.pi / 2])


def kr_odd(r, z, rb, zb, delta=0):
    return radial_half(r, rb, z - zb, delta) - radial_half(r, rb, z + zb, delta)


def kz_full(r, z, rb, zb, delta=0):
    return vertical_half(r, rb, z - zb, delta) - vertical_half(r, rb, z + zb, delta)


def kernel_g(r, z, rb, zb):
    return radial_half(r, rb, z + zb) / (r * rb * rb)


def s_integral_example():
    # int_0^1 s (1 - s^2)^(-1/2) (5 - 2 s)^(-3/2) ds
    return mp.quad(lambda s: s / mp.sqrt(1 - s * s) * (5 - 2 * s) ** -1.5, [0, 1])


def ring_Q(rc=2.0, zc=1.0, rho=0.5, amp=-1.0):
    def w(z, r):
        q = ((r - rc) / rho) ** 2 + ((z - zc) / rho) ** 2
        return amp * math.exp(-1.0 / (1.0 - q)) if q < 1 else 0.0
    val, err = integrate.dblquad(lambda z, r: -r * r * w(z, r), rc - rho, rc + rho,
                                 lambda r: zc - math.sqrt(max(0.0, rho**2 - (r - rc) ** 2)),
                                 lambda r: zc + math.sqrt(max(0.0, rho**2 - (r - rc) ** 2)),
                                 epsabs=1e-13, epsrel=1e-12)
    return val, err


if __name__ == "__main__":
    print("s_integral 1/(5-2s)^1.5      ", mp.nstr(s_integral_example(), 20))
    print("Kr_odd(2,1,2.2,1.3)          ", mp.nstr(kr_odd(2, 1, 2.2, 1.3), 20))
    print("Kz_full(2,1,2.2,1.3)         ", mp.nstr(kz_full(2, 1, 2.2, 1.3), 20))
    print("Kr_odd(1.5,0.4,2.5,0.9,0.05) ", mp.nstr(kr_odd(1.5, 0.4, 2.5, 0.9, 0.05), 20))
    print("Kz_full(1.5,0.4,2.5,0.9,0.05)", mp.nstr(kz_full(1.5, 0.4, 2.5, 0.9, 0.05), 20))
    print("Kr_odd near (2,1,2.01,1.005) ", mp.nstr(kr_odd(2, 1, 2.01, 1.005), 20))
    print("G(2,1,2.2,1.3)               ", mp.nstr(kernel_g(2, 1, 2.2, 1.3), 20))
    print("G(2,1,2,1)                   ", mp.nstr(kernel_g(2, 1, 2, 1), 20))
    print("G(2.5,1.5,2.5,1.5)           ", mp.nstr(kernel_g(2.5, 1.5, 2.5, 1.5), 20))
    print("vertical_half(0,1.3,0.7)     ", mp.nstr(vertical_half(0, 1.3, 0.7), 20),
          " closed form", mp.nstr(mp.pi * 1.3**2 / (0.7**2 + 1.3**2) ** 1.5, 20))
    q, e = ring_Q()
    print("Q ring pair                  ", repr(q), "err", e)
