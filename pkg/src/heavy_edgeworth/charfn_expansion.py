"""Small-theta expansion of the cumulant generating function.

``psi(theta) = log phi(theta)`` splits into the Taylor part ``chi`` built from
the finite cumulants and a non-analytic part ``xi`` of size
``|theta|^alpha`` times a slowly varying factor.  The ordinary Edgeworth
coefficients come from the composition sums ``xi_{k,q}`` of the cumulant
series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Union

import numpy as np

from .density_model import CumulantSet, DensitySpec, SlowlyVarying, cumulants
from .errors import DomainError, InsufficientCumulants
from .parity import INTEGER_TOL, Parity, ParityClass

Number = Union[int, float, Fraction, complex]
# polynomial in (i theta): degree -> coefficient
Poly = dict


@lru_cache(maxsize=None)
def compositions(k: int, q: int) -> tuple[tuple[int, ...], ...]:
    """Ordered tuples (j_1..j_k), each j_i >= 3, with sum(j_i - 2) = q - 2."""
    if k < 1:
        return ()
    total = q - 2  # distribute over k parts, each part j_i - 2 >= 1

    def rec(parts: int, remaining: int) -> list[tuple[int, ...]]:
        if parts == 1:
            return [(remaining + 2,)] if remaining >= 1 else []
        out = []
        for first in range(1, remaining - parts + 2):
            out.extend((first + 2,) + rest for rest in rec(parts - 1, remaining - first))
        return out

    return tuple(rec(k, total))


def _kappa_lookup(kap: Union[CumulantSet, Mapping[int, Number]]) -> Callable[[int], Number]:
    if isinstance(kap, CumulantSet):
        def get(j: int) -> Number:
            if j > kap.K:
                raise InsufficientCumulants(f"cumulant {j} needed, only {kap.K} finite")
            return kap.kappa(j)
    else:
        def get(j: int) -> Number:
            if j not in kap:
                raise InsufficientCumulants(f"cumulant {j} not supplied")
            return kap[j]
    return get


def xi_kq(k: int, q: int, kap: Union[CumulantSet, Mapping[int, Number]]) -> Poly:
    """Coefficient of n^-(q/2-1) in (sum_j kappa_j (i theta)^j / (j! n^(j/2-1)))^k.

    Returned as ``{degree: coefficient}`` in powers of (i theta); every
    composition has degree q - 2 + 2k so the result is a monomial or empty.
    """
    if q < 3 or not 1 <= k <= q:
        raise DomainError(f"need q >= 3 and 1 <= k <= q, got k={k}, q={q}")
    comps = compositions(k, q)
    if not comps:
        return {}
    get = _kappa_lookup(kap)
    acc: Number = 0
    for comp in comps:
        term: Number = Fraction(1)
        for j in comp:
            term = term * get(j) * Fraction(1, math.factorial(j))
        acc = acc + term
    return {q - 2 + 2 * k: acc}


def edgeworth_coefficients(q: int, kap: Union[CumulantSet, Mapping[int, Number]]) -> Poly:
    """sum_k xi_{k,q}/k! as ``{m: c_m}``; G_q(x) = sum_m c_m H_m(x)."""
    out: Poly = {}
    for k in range(1, q - 1):
        for deg, c in xi_kq(k, q, kap).items():
            out[deg] = out.get(deg, 0) + c * Fraction(1, math.factorial(k))
    return out


# --------------------------------------------------------------------------
# Non-analytic part


@dataclass(frozen=True, eq=False)
class XiTerm:
    """coefficient * |theta|^alpha * sv(1/|theta|), times sign(theta) if odd."""

    coefficient: complex
    sv_name: str
    sv: Callable
    odd: bool = False

    def __call__(self, theta: float, alpha: float) -> complex:
        if theta == 0:
            return 0j
        a = abs(theta)
        val = self.coefficient * a**alpha * complex(self.sv(1.0 / a))
        return val * (1 if theta > 0 else -1) if self.odd else val


@dataclass(frozen=True, eq=False)
class CharFnExpansion:
    alpha: float
    parity: ParityClass
    chi_coeffs: dict  # j -> kappa_j / j!, multiplying (i theta)^j
    xi_case: str
    xi_terms: tuple[XiTerm, ...]

    @property
    def xi_coefficient(self) -> complex:
        """Constant in front of the even (sign-independent) slowly varying term."""
        return self.xi_terms[0].coefficient

    @property
    def xi_sv(self) -> str:
        return self.xi_terms[0].sv_name

    @property
    def sign_convention(self) -> str:
        odd = [t.sv_name for t in self.xi_terms if t.odd]
        return "sign(theta) multiplies " + ", ".join(odd) if odd else "even in theta"

    def chi(self, theta: float) -> complex:
        it = 1j * theta
        return sum(c * it**j for j, c in self.chi_coeffs.items())

    def xi(self, theta: float) -> complex:
        return sum(t(theta, self.alpha) for t in self.xi_terms)


def _symmetric_terms(alpha: float, par: ParityClass, L: SlowlyVarying) -> tuple[str, tuple[XiTerm, ...]]:
    g = math.gamma(alpha + 1.0)
    if par.tag is Parity.EVEN:
        c = 2.0 * (-1) ** (par.order // 2) / g
        return "symmetric-even", (XiTerm(c, "zeta_L", L.zeta),)
    c = -math.pi / (g * math.sin(alpha * math.pi / 2.0))
    tag = "symmetric-odd" if par.tag is Parity.ODD else "symmetric-noninteger"
    return tag, (XiTerm(c, "L", L.eval),)


def tail_parts(spec: DensitySpec) -> tuple[Callable, Callable, Callable, Callable]:
    """(L_r, L_s, zeta_{L_r}, zeta_{L_s}) on x > 0 from the effective tails."""
    Lp, Lm = spec.L_plus, spec.L_minus
    b, g = spec.beta, spec.gamma
    if abs(b - g) < INTEGER_TOL:
        return (lambda x: 0.5 * (Lp(x) + Lm(x)), lambda x: 0.5 * (Lp(x) - Lm(x)),
                lambda x: 0.5 * (Lp.zeta(x) + Lm.zeta(x)), lambda x: 0.5 * (Lp.zeta(x) - Lm.zeta(x)))
    if b < g:
        return (lambda x: 0.5 * Lp(x), lambda x: 0.5 * Lp(x),
                lambda x: 0.5 * Lp.zeta(x), lambda x: 0.5 * Lp.zeta(x))
    return (lambda x: 0.5 * Lm(x), lambda x: -0.5 * Lm(x),
            lambda x: 0.5 * Lm.zeta(x), lambda x: -0.5 * Lm.zeta(x))


def _two_sided_terms(spec: DensitySpec, par: ParityClass) -> tuple[str, tuple[XiTerm, ...]]:
    alpha = par.value
    Lr, Ls, zr, zs = tail_parts(spec)
    g = math.gamma(alpha + 1.0)
    if par.tag is Parity.EVEN:
        c = 2.0 * (1j ** par.order) / g
        return "two-sided-even", (XiTerm(c, "zeta_L_r", zr), XiTerm(c * 0.5j * math.pi, "L_s", Ls, odd=True))
    if par.tag is Parity.ODD:
        c = 2.0 * (1j ** par.order) / g
        return "two-sided-odd", (XiTerm(c * 0.5j * math.pi, "L_r", Lr), XiTerm(c, "zeta_L_s", zs, odd=True))
    c = -2.0 * math.pi / (g * math.sin(alpha * math.pi))
    return "two-sided-noninteger", (
        XiTerm(c * math.cos(alpha * math.pi / 2.0), "L_r", Lr),
        XiTerm(-1j * c * math.sin(alpha * math.pi / 2.0), "L_s", Ls, odd=True),
    )


def build_expansion(spec: DensitySpec, two_sided: bool | None = None) -> CharFnExpansion:
    """Assemble chi and xi for a standardized spec.

    ``two_sided`` forces the even/odd decomposition path; by default it is
    used whenever the spec is not symmetric.
    """
    if not spec.standardized:
        raise DomainError("spec must be standardized (mean 0, variance 1)")
    kap = cumulants(spec)
    chi = {j: kap.kappa(j) / math.factorial(j) for j in range(1, kap.K + 1)}
    par = ParityClass.of(spec.alpha)
    if two_sided is None:
        two_sided = not spec.symmetric
    if two_sided:
        tag, terms = _two_sided_terms(spec, par)
    else:
        tag, terms = _symmetric_terms(par.value, par, spec.L_plus)
    return CharFnExpansion(par.value, par, chi, tag, terms)


def eval_psi_expansion(exp: CharFnExpansion, theta: float) -> complex:
    """chi(theta) + xi(theta)."""
    if theta == 0:
        return 0j
    return complex(exp.chi(theta) + exp.xi(theta))
