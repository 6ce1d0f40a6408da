"""Corrected density expansion for S_n / sqrt(n).

    f_n(x) ~ eta(x) [1 + sum_j G_j(x) / n^(j/2-1)] + F(x, n)

``G_j`` are the ordinary Edgeworth polynomials and ``F`` is the Fourier
inverse of the non-analytic part of the cumulant generating function,
written with Hermite polynomials (even index), derivatives of
E(x) = D(x/sqrt 2) (odd index) or parabolic cylinder functions
(non-integer index).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .charfn_expansion import edgeworth_coefficients
from .density_model import CumulantSet, DensitySpec, cumulants, largest_moment_order
from .errors import DomainError, InsufficientCumulants
from .parity import INTEGER_TOL, Parity, ParityClass, as_parity
from .special_functions import (
    SQRT2,
    SQRT_2PI,
    dawson_scaled_derivative,
    hermite,
    pcf_gauss_integral,
)

X_CLAMP = 1e-8


def gaussian(x):
    return np.exp(-0.5 * np.square(x)) / SQRT_2PI


@dataclass(frozen=True)
class ExpansionResult:
    x: float
    n: int
    gaussian: float
    edgeworth_terms: list = field(default_factory=list)  # (j, G_j(x)/n^(j/2-1))
    correction: float = 0.0
    total: float = 0.0
    case_tag: str = ""
    clamped: bool = False

    @property
    def edgeworth_only(self) -> float:
        return self.gaussian * (1.0 + sum(t for _, t in self.edgeworth_terms))


def edgeworth_polynomial(j: int, kap: CumulantSet, x):
    """G_j(x) = sum_m c_m H_m(x) from the composition sums."""
    if j < 3:
        raise DomainError("Edgeworth polynomials start at j = 3")
    if j > kap.K:
        raise InsufficientCumulants(f"G_{j} needs kappa_{j}; only {kap.K} cumulants finite")
    out = 0.0
    for m, c in edgeworth_coefficients(j, kap).items():
        out = out + float(c) * hermite(m, x)
    return out


def g_alpha(alpha: float, parity: ParityClass | None, x):
    """Coefficient G_alpha(x) of the symmetric correction L(sqrt(n) x)/n^(alpha/2-1)."""
    if not alpha > 2:
        raise DomainError(f"tail index must exceed 2, got {alpha}")
    par = as_parity(alpha, parity)
    if par.tag is Parity.ODD:
        k = par.order
        return -SQRT2 / math.factorial(k) * dawson_scaled_derivative(k, x)
    if par.tag is Parity.EVEN:
        k = par.order
        return math.sqrt(2.0 / math.pi) * np.exp(-0.5 * np.square(x)) * hermite(k, x) / math.factorial(k)
    a = par.value
    pcf = np.vectorize(lambda z: pcf_gauss_integral(a, z) + pcf_gauss_integral(a, -z), otypes=[float])
    s = pcf(x)
    return (-s / (math.gamma(a + 1.0) * math.sin(a * math.pi)))[()]


# --------------------------------------------------------------------------
# Non-analytic correction


def _pieces(idx: float, par: ParityClass, x: float):
    """(Hermite piece, Dawson piece) or (I(x), I(-x)) for the given index."""
    if par.tag is Parity.NONINTEGER:
        return pcf_gauss_integral(idx, x), pcf_gauss_integral(idx, -x)
    k = par.order
    herm = math.exp(-0.5 * x * x) / SQRT_2PI * float(hermite(k, x))
    daw = float(dawson_scaled_derivative(k, x)) / SQRT2
    return herm, daw


def _correction(spec: DensitySpec, x: float, n: int, x_sv: float) -> tuple[float, str]:
    b, g = spec.beta, spec.gamma
    u = math.sqrt(n) * x_sv
    Lp, Lm = spec.L_plus, spec.L_minus
    if abs(b - g) < INTEGER_TOL:
        idx, case = spec.alpha, "case1"
    elif b < g:
        idx, case = b, "case2"
    else:
        idx, case = g, "case3"
    par = ParityClass.of(idx)
    idx = par.value
    scale = math.gamma(idx + 1.0) * n ** (idx / 2.0 - 1.0)
    tag = f"symmetric-{par.tag.value}" if spec.symmetric else f"{case}-{par.tag.value}"

    if par.tag is Parity.NONINTEGER:
        ip, im = _pieces(idx, par, x)  # I(x), I(-x)
        sin_pi = math.sin(idx * math.pi)
        lp = float(Lp(u)) if case != "case3" else 0.0
        lm = float(Lm(u)) if case != "case2" else 0.0
        return -(lp * im + lm * ip) / (sin_pi * scale), tag

    herm, daw = _pieces(idx, par, x)
    even = par.tag is Parity.EVEN
    if case == "case1":
        lp, lm = float(Lp(u)), float(Lm(u))
        zp, zm = float(Lp.zeta(u)), float(Lm.zeta(u))
        if even:
            val = herm * (zp + zm) + daw * (lp - lm)
        else:
            val = herm * (zp - zm) - daw * (lp + lm)
    elif case == "case2":
        lp, zp = float(Lp(u)), float(Lp.zeta(u))
        val = herm * zp + daw * lp if even else herm * zp - daw * lp
    else:
        lm, zm = float(Lm(u)), float(Lm.zeta(u))
        val = herm * zm - daw * lm if even else -herm * zm - daw * lm
    return val / scale, tag


def correction_F(spec: DensitySpec, x: float, n: int) -> float:
    """Non-analytic correction F(x, n) for x > 0."""
    if not x > 0:
        raise DomainError(f"correction_F is evaluated for x > 0 (got {x}); use corrected_density")
    if not spec.standardized:
        raise DomainError("spec must be standardized (mean 0, variance 1)")
    return _correction(spec, x, n, x)[0]


@lru_cache(maxsize=64)
def _cumulants(spec: DensitySpec) -> CumulantSet:
    return cumulants(spec)


@lru_cache(maxsize=64)
def _mirror(spec: DensitySpec) -> DensitySpec:
    return spec.mirrored()


def corrected_density(spec: DensitySpec, x: float, n: int, max_order: int | None = None) -> ExpansionResult:
    """Gaussian, Edgeworth terms and correction at one point.

    ``max_order`` keeps G_3 .. G_{max_order+2}; None keeps all finite ones.
    Negative x is evaluated on the tail-swapped spec at -x.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    if not spec.standardized:
        raise DomainError("spec must be standardized (mean 0, variance 1)")
    x = float(x)
    work, xe = (spec, x) if x >= 0 else (_mirror(spec), -x)
    clamped = xe < X_CLAMP
    kap = _cumulants(work)
    top = largest_moment_order(work.alpha)
    if max_order is not None:
        top = min(top, max_order + 2)
    terms = []
    for j in range(3, top + 1):
        if work.symmetric and j % 2:
            continue
        terms.append((j, float(edgeworth_polynomial(j, kap, xe)) / n ** (j / 2.0 - 1.0)))
    corr, tag = _correction(work, xe, n, max(xe, X_CLAMP))
    eta = float(gaussian(x))
    total = eta * (1.0 + sum(t for _, t in terms)) + corr
    return ExpansionResult(x, n, eta, terms, corr, total, tag, clamped)


def corrected_density_grid(spec: DensitySpec, xs, n: int, max_order: int | None = None) -> np.ndarray:
    return np.array([corrected_density(spec, x, n, max_order).total for x in np.atleast_1d(xs)])


# --------------------------------------------------------------------------
# Tail and region formulas


def tail_equivalent(spec: DensitySpec, x: float, n: int) -> float:
    """L(sqrt(n) x) / (x^(1+a) n^(a/2-1)): the single-big-jump density scale."""
    if not x > 0:
        raise DomainError("tail_equivalent needs x > 0")
    idx = spec.beta
    if ParityClass.of(idx).tag is Parity.EVEN:
        raise DomainError("even tail index: the correction never matches the tail equivalent")
    return float(spec.L_plus(math.sqrt(n) * x)) / (x ** (1.0 + idx) * n ** (idx / 2.0 - 1.0))


def rozovskii_tail(spec: DensitySpec, x_raw: float, n: int) -> float:
    """Gaussian tail plus n single-jump probabilities: P(S_n > x_raw)."""
    if not x_raw > 0:
        raise DomainError("x_raw must be positive")
    return float(ndtr(-x_raw / math.sqrt(n))) + n * spec.tail_probability(x_raw)


def moderate_region_bound(alpha: float, n: int) -> float:
    """sqrt((alpha - 2) log n)."""
    if not alpha > 2:
        raise DomainError("alpha must exceed 2")
    if n < 2:
        raise DomainError("n must be at least 2")
    return math.sqrt((alpha - 2.0) * math.log(n))
