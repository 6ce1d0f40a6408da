"""Special functions behind the non-analytic correction terms.

Hermite polynomials (probabilists' convention), Dawson's integral and the
derivatives of ``D(x/sqrt(2))``, the parabolic cylinder function
``D_nu(z)``, and closed forms for the Gaussian-weighted Fourier kernels

    int exp(-i t x - t^2/2) |t|^a dt            (even kernel)
    int exp(-i t x - t^2/2) sign(t) |t|^a dt    (odd kernel)

All functions are pure and accept scalars; most also broadcast over numpy
arrays in ``x``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError
from .parity import Parity, ParityClass, as_parity

SQRT2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_PI_2 = math.sqrt(math.pi / 2.0)

_DAWSON_SERIES_MAX = 6.0
# p_n(x) E(x) + q_n(x) loses about log10(cond) digits; beyond this we switch
# to the cancellation-free integral representation.
_DERIV_COND_LIMIT = 1e4
_MAX_EXACT_ORDER = 20


def hermite(k: int, x):
    """Probabilists' Hermite polynomial He_k(x) by three-term recurrence."""
    if k < 0:
        raise DomainError(f"Hermite order must be non-negative, got {k}")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if k == 0:
        return h_prev if x.ndim else float(h_prev)
    h = x.copy()
    for j in range(1, k):
        h_prev, h = h, x * h - j * h_prev
    return h if x.ndim else float(h)


# --------------------------------------------------------------------------
# Dawson's integral


def _dawson_series(z: np.ndarray) -> np.ndarray:
    # D(z) = exp(-z^2) sum_k z^(2k+1) / (k! (2k+1)); all terms positive for
    # z > 0 so there is no cancellation.
    z2 = z * z
    term = z.copy()
    total = z.copy()
    for k in range(1, 400):
        term = term * z2 / k
        inc = term / (2 * k + 1)
        total = total + inc
        if np.all(np.abs(inc) <= 1e-17 * np.abs(total)):
            break
    return np.exp(-z2) * total


def _dawson_asymptotic(z: np.ndarray) -> np.ndarray:
    # D(z) ~ 1/(2z) sum_k (2k-1)!! / (2 z^2)^k, truncated at its smallest term
    inv = 1.0 / (2.0 * z * z)
    term = np.ones_like(z)
    total = np.ones_like(z)
    live = np.ones(z.shape, dtype=bool)
    for k in range(1, 200):
        nxt = term * (2 * k - 1) * inv
        live &= np.abs(nxt) < np.abs(term)
        term = np.where(live, nxt, 0.0)
        total = total + term
        if not live.any() or np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total / (2.0 * z)


def dawson(z):
    """Dawson's integral exp(-z^2) * int_0^z exp(t^2) dt."""
    z = np.asarray(z, dtype=float)
    a = np.abs(np.atleast_1d(z))
    out = np.empty_like(a)
    small = a <= _DAWSON_SERIES_MAX
    if small.any():
        out[small] = _dawson_series(a[small])
    if (~small).any():
        out[~small] = _dawson_asymptotic(a[~small])
    out = np.sign(np.atleast_1d(z)) * out
    return out.reshape(z.shape) if z.ndim else float(out[0])


# --------------------------------------------------------------------------
# Derivatives of E(x) = D(x / sqrt 2)


@dataclass(frozen=True)
class DawsonDerivativePolys:
    """d^n/dx^n D(x/sqrt2) = p_n(x) D(x/sqrt2) + q_n(x).

    ``p_coeffs`` are exact rationals; ``q_coeffs`` are exact rationals of the
    rescaled polynomial sqrt(2) * q_n, because every q_n carries one factor of
    1/sqrt(2). Coefficients are stored lowest degree first.
    """

    order: int
    p_coeffs: tuple[Fraction, ...]
    q_coeffs: tuple[Fraction, ...]

    def p(self, x):
        return np.polynomial.polynomial.polyval(x, [float(c) for c in self.p_coeffs])

    def q(self, x):
        return np.polynomial.polynomial.polyval(x, [float(c) for c in self.q_coeffs]) / SQRT2


def _shift_neg(c: tuple[Fraction, ...]) -> list[Fraction]:
    # coefficients of -x * c(x)
    return [Fraction(0)] + [-v for v in c]


def _axpy(a: list[Fraction], b: list[Fraction], scale: int) -> tuple[Fraction, ...]:
    # a - scale * b, padded
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    out = [x - scale * y for x, y in zip(a, b)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def dawson_derivative_polys(n: int) -> DawsonDerivativePolys:
    """Exact recurrence E^(m+1) = -(x E^(m) + m E^(m-1)), E' = 1/sqrt2 - x E."""
    if n < 0:
        raise DomainError(f"derivative order must be non-negative, got {n}")
    if n == 0:
        return DawsonDerivativePolys(0, (Fraction(1),), (Fraction(0),))
    if n == 1:
        return DawsonDerivativePolys(1, (Fraction(0), Fraction(-1)), (Fraction(1),))
    prev, cur = dawson_derivative_polys(n - 2), dawson_derivative_polys(n - 1)
    m = n - 1
    p = _axpy(_shift_neg(cur.p_coeffs), list(prev.p_coeffs), m)
    q = _axpy(_shift_neg(cur.q_coeffs), list(prev.q_coeffs), m)
    return DawsonDerivativePolys(n, p, q)


def _gauss_half_moment(k: int) -> float:
    # int_0^inf s^k exp(-s^2/2) ds
    return 2.0 ** ((k - 1) / 2.0) * math.gamma((k + 1) / 2.0)


def _laplace_gauss_integral(nu: float, x: float) -> float:
    """J_nu(x) = int_0^x y^nu exp(y^2/2 - x y) dy for x >= 0 (positive integrand)."""
    if x <= 0.0:
        return 0.0
    if x < 1e-8:
        return x ** (nu + 1.0) / (nu + 1.0)  # exp factor is 1 to machine precision
    f = lambda y: y**nu * math.exp(y * (0.5 * y - x))
    # the mass sits near y = 0 on a scale 1/x; split there for the adaptive rule
    pts = [p for p in (min(1.0, 20.0 / x), x - min(1.0, 20.0 / x)) if 0.0 < p < x]
    val, _ = integrate.quad(f, 0.0, x, points=pts or None, epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def _dawson_derivative_integral(n: int, x: float) -> float:
    # sqrt2 E^(n)(x) = (-1)^n J_n(x) + exp(-x^2/2) Im int_0^inf (i s - x)^n e^{-s^2/2} ds,
    # from rotating the contour of int_0^inf t^n exp(-t^2/2 + i x t) dt onto
    # the segment [0, i x]; valid for x >= 0.
    head = (-1) ** n * _laplace_gauss_integral(float(n), x)
    im = 0.0
    for k in range(1, n + 1, 2):
        im += math.comb(n, k) * (-1) ** ((k - 1) // 2) * (-x) ** (n - k) * _gauss_half_moment(k)
    return (head + math.exp(-0.5 * x * x) * im) / SQRT2


def dawson_scaled_derivative(n: int, x):
    """n-th derivative of D(x/sqrt2) in x."""
    polys = dawson_derivative_polys(n)
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x)
    e = dawson(flat / SQRT2)
    pe = polys.p(flat) * e
    q = polys.q(flat)
    out = pe + q
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        cond = (np.abs(pe) + np.abs(q)) / np.maximum(np.abs(out), 1e-300)
    bad = (cond > _DERIV_COND_LIMIT) | (n > _MAX_EXACT_ORDER)
    for i in np.flatnonzero(bad):
        xi = flat[i]
        # E is odd, so E^(n)(-x) = (-1)^(n+1) E^(n)(x)
        sign = 1.0 if xi >= 0 else (-1.0) ** (n + 1)
        out[i] = sign * _dawson_derivative_integral(n, abs(xi))
    return out.reshape(x.shape) if x.ndim else float(out[0])


# --------------------------------------------------------------------------
# Parabolic cylinder function


def _pcf_rotated(nu: float, z: float) -> float:
    # int_0^inf exp(-s^2/2) (s^2+z^2)^(nu/2) cos(nu (pi/2 - atan2(z, s))) ds
    def f(s):
        return math.exp(-0.5 * s * s) * (s * s + z * z) ** (0.5 * nu) * math.cos(
            nu * (0.5 * math.pi - math.atan2(z, s))
        )

    top = 40.0
    pts = [p for p in (abs(z), 1.0) if 1e-8 < p < top]  # tiny |z| adds nothing but trouble
    with warnings.catch_warnings():
        # target 1e-13; roundoff warnings near that floor are expected
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, 0.0, top, points=sorted(set(pts)) or None,
                                epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def _sin_pi(v: float) -> float:
    # sin(pi v) with exact zeros at integers
    return math.sin(math.pi * (v - 2.0 * round(0.5 * v)))


def pcf_gauss_integral(nu: float, z: float) -> float:
    """int_0^inf exp(-t^2/2) t^nu cos(z t - nu pi/2) dt = sqrt(pi/2) e^{-z^2/4} D_nu(z).

    Evaluated without oscillation: the contour is moved to Im t = z, which
    leaves a Laplace-type integral over [0, |z|] (only for z < 0) plus a
    Gaussian-damped smooth remainder.
    """
    if nu <= -1.0:
        raise DomainError(f"parabolic cylinder order must exceed -1, got {nu}")
    z = float(z)
    rest = math.exp(-0.5 * z * z) * _pcf_rotated(nu, z)
    if z >= 0.0:
        return rest
    return rest - _sin_pi(nu) * _laplace_gauss_integral(nu, -z)


def parabolic_cylinder(nu: float, z: float) -> float:
    """Classical parabolic cylinder function D_nu(z) for real nu > -1."""
    if nu <= -1.0:
        raise DomainError(f"parabolic cylinder order must exceed -1, got {nu}")
    z = float(z)
    c = math.sqrt(2.0 / math.pi)
    head = c * math.exp(-0.25 * z * z) * _pcf_rotated(nu, z)
    if z >= 0.0:
        return head
    return head - c * _sin_pi(nu) * math.exp(0.25 * z * z) * _laplace_gauss_integral(nu, -z)


# --------------------------------------------------------------------------
# Gaussian-weighted Fourier kernels


def _check_alpha(alpha: float) -> None:
    if not alpha > 2.0:
        raise DomainError(f"tail index must exceed 2, got {alpha}")


def fourier_kernel_even_fn(alpha: float, x: float, parity: ParityClass | None = None) -> float:
    """int exp(-i t x - t^2/2) |t|^alpha dt (real, even in x)."""
    _check_alpha(alpha)
    par = as_parity(alpha, parity)
    if par.tag is Parity.ODD:
        a = par.order
        return 2.0 * SQRT2 * (-1) ** ((a - 1) // 2) * dawson_scaled_derivative(a, x)
    if par.tag is Parity.EVEN:
        a = par.order
        return (-1) ** (a // 2) * SQRT_2PI * math.exp(-0.5 * x * x) * hermite(a, x)
    sec = 1.0 / math.cos(0.5 * math.pi * alpha)
    return sec * (pcf_gauss_integral(alpha, x) + pcf_gauss_integral(alpha, -x))


def fourier_kernel_odd_fn(alpha: float, x: float, parity: ParityClass | None = None) -> complex:
    """int exp(-i t x - t^2/2) sign(t) |t|^alpha dt (purely imaginary, odd in x).

    Equals -2i int_0^inf sin(t x) t^alpha exp(-t^2/2) dt.
    """
    _check_alpha(alpha)
    par = as_parity(alpha, parity)
    if par.tag is Parity.EVEN:
        a = par.order
        return -2.0 * SQRT2 * (1j) ** (a + 1) * dawson_scaled_derivative(a, x)
    if par.tag is Parity.ODD:
        a = par.order
        return -SQRT_2PI * math.exp(-0.5 * x * x) * (1j) ** a * hermite(a, x)
    csc = 1.0 / math.sin(0.5 * math.pi * alpha)
    return -1j * csc * (pcf_gauss_integral(alpha, x) - pcf_gauss_integral(alpha, -x))
