import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from heavy_edgeworth.charfn_expansion import build_expansion
from heavy_edgeworth.density_model import (
    SlowlyVarying,
    SymmetricPareto,
    SymmetricRV,
    TwoSided,
    cumulants,
)
from heavy_edgeworth.edgeworth_correction import (
    X_CLAMP,
    correction_F,
    corrected_density,
    edgeworth_polynomial,
    g_alpha,
    gaussian,
    moderate_region_bound,
    rozovskii_tail,
    tail_equivalent,
)
from heavy_edgeworth.errors import DomainError, InsufficientCumulants
from heavy_edgeworth.special_functions import hermite


def xi_inverse(spec, x, n):
    """(1/2pi) int exp(-i t x - t^2/2) n xi(t/sqrt n) dt by direct quadrature."""
    e = build_expansion(spec)
    sq = math.sqrt(n)

    def f(t):
        return (np.exp(-1j * t * x) * n * e.xi(t / sq)).real * math.exp(-t * t / 2)

    # integrand is even in t after taking the real part (Hermitian xi)
    val = integrate.quad(f, 0, 40, limit=400, epsabs=1e-15, epsrel=1e-12)[0]
    return val / math.pi


class TestEdgeworthPolynomial:
    kap = cumulants(TwoSided(5.5, 5.5, SlowlyVarying.constant(1), SlowlyVarying.constant(2)).standardize())

    def test_g3(self):
        x = np.linspace(-3, 3, 13)
        assert np.allclose(edgeworth_polynomial(3, self.kap, x), self.kap.kappa(3) * hermite(3, x) / 6, rtol=1e-13)

    def test_g4(self):
        x = np.linspace(-3, 3, 13)
        k3, k4 = self.kap.kappa(3), self.kap.kappa(4)
        ref = k3**2 * hermite(6, x) / 72 + k4 * hermite(4, x) / 24
        assert np.allclose(edgeworth_polynomial(4, self.kap, x), ref, rtol=1e-12, atol=1e-14)

    def test_symmetric_g3_vanishes(self):
        kap = cumulants(SymmetricPareto.standard(4.5))
        assert edgeworth_polynomial(3, kap, 1.3) == 0

    def test_errors(self):
        with pytest.raises(DomainError):
            edgeworth_polynomial(2, self.kap, 0.0)
        with pytest.raises(InsufficientCumulants):
            edgeworth_polynomial(6, self.kap, 0.0)

    @pytest.mark.parametrize("j", range(1, 7))
    def test_gaussian_derivative_identity(self, j):
        # eta H_j = (-1)^j eta^(j) by a 13-point central stencil
        x = np.linspace(-3, 3, 7)
        h = 0.1
        k = np.arange(-6, 7)
        # weights from the Vandermonde system for the j-th derivative
        A = np.vander(k * h, increasing=True).T
        b = np.zeros(len(k))
        b[j] = math.factorial(j)
        w = np.linalg.solve(A, b)
        fd = sum(wi * gaussian(x + ki * h) for ki, wi in zip(k, w))
        assert np.allclose(gaussian(x) * hermite(j, x), (-1) ** j * fd, atol=1e-6)


class TestGAlpha:
    def test_even_at_zero(self):
        assert g_alpha(4, None, 0.0) == pytest.approx(math.sqrt(2 / math.pi) * 3 / 24, rel=1e-14)

    @given(st.sampled_from([2.5, 3.5, 4.5]), st.floats(0, 6))
    @settings(max_examples=25, deadline=None)
    def test_noninteger_even_in_x(self, alpha, x):
        assert g_alpha(alpha, None, -x) == pytest.approx(g_alpha(alpha, None, x), rel=1e-12, abs=1e-15)

    def test_odd_tail_series(self):
        # G_3(x) x^4 = 1 + 10/x^2 + 105/x^4 + O(x^-6), from the Dawson asymptotic series
        for x in (12.0, 20.0, 40.0):
            ref = 1 + 10 / x**2 + 105 / x**4
            assert g_alpha(3, None, x) * x**4 == pytest.approx(ref, rel=2e-3 * (12 / x) ** 6)

    @pytest.mark.parametrize("alpha", [2.5, 3, 3.5])
    def test_tail_ratio_tends_to_one(self, alpha):
        r = [g_alpha(alpha, None, x) * x ** (1 + alpha) for x in (8.0, 12.0, 20.0, 40.0)]
        assert all(a > b > 1 for a, b in zip(r, r[1:]))
        assert r[-1] == pytest.approx(1.0, rel=0.01)

    def test_domain(self):
        with pytest.raises(DomainError):
            g_alpha(2.0, None, 0.5)

    def test_vectorized(self):
        x = np.array([0.1, 1.0, 2.0])
        assert np.allclose(g_alpha(3.5, None, x), [g_alpha(3.5, None, v) for v in x], rtol=1e-14)


class TestCorrectionF:
    def test_pareto3_reduction(self):
        p = SymmetricPareto.standard(3)
        assert correction_F(p, 1.0, 100) == pytest.approx(g_alpha(3, None, 1.0) * p.a_f / 10, rel=1e-13)

    @pytest.mark.parametrize("alpha", [3, 4, 3.5])
    def test_case1_matches_symmetric(self, alpha):
        L = SlowlyVarying.log_power(1.0)
        sym = SymmetricRV(alpha, L).standardize()
        two = TwoSided(alpha, alpha, L, L).standardize()
        for x in (0.3, 1.0, 2.5):
            for n in (5, 50):
                a, b = correction_F(sym, x, n), correction_F(two, x, n)
                assert abs(a - b) <= 1e-12 * abs(a), (a, b)

    @pytest.mark.parametrize("alpha", [3.0, 5.0])
    def test_odd_symmetric_matches_xi_inverse(self, alpha):
        p = SymmetricPareto.standard(alpha)
        for x in (0.4, 1.7):
            assert correction_F(p, x, 20) == pytest.approx(xi_inverse(p, x, 20), rel=1e-8)

    @pytest.mark.parametrize("beta,gamma", [(3.5, 3.5), (3.5, 4.5), (4.5, 3.5), (2.5, 2.5)])
    def test_noninteger_two_sided_matches_xi_inverse(self, beta, gamma):
        t = TwoSided(beta, gamma, SlowlyVarying.constant(1), SlowlyVarying.constant(2)).standardize()
        for x in (0.4, 1.7):
            assert correction_F(t, x, 30) == pytest.approx(xi_inverse(t, x, 30), rel=1e-8)

    def test_case2_uses_right_tail_only(self):
        a = TwoSided(3.5, 4.5, SlowlyVarying.constant(1), SlowlyVarying.constant(1)).standardize()
        b = TwoSided(3.5, 4.5, SlowlyVarying.constant(1), SlowlyVarying.constant(3)).standardize()
        # after standardization only the rescaled L_+ enters; compare through it
        ra = correction_F(a, 1.2, 40) / a.L_plus(math.sqrt(40) * 1.2)
        rb = correction_F(b, 1.2, 40) / b.L_plus(math.sqrt(40) * 1.2)
        assert ra == pytest.approx(rb, rel=1e-12)

    def test_positive_far_out(self):
        p = SymmetricPareto.standard(3)
        assert all(correction_F(p, x, 50) > 0 for x in (4.0, 6.0, 10.0))

    def test_domain(self):
        p = SymmetricPareto.standard(3)
        with pytest.raises(DomainError):
            correction_F(p, 0.0, 10)
        with pytest.raises(DomainError):
            correction_F(SymmetricPareto(3, 1.0, 1.0), 1.0, 10)


class TestCorrectedDensity:
    def test_identity(self):
        t = TwoSided(5.5, 5.5, SlowlyVarying.constant(1), SlowlyVarying.ramp(0.5, 2)).standardize()
        for x in (-1.5, 0.2, 2.0):
            r = corrected_density(t, x, 25)
            assert r.total == pytest.approx(r.gaussian * (1 + sum(v for _, v in r.edgeworth_terms)) + r.correction, rel=1e-15)
            assert [j for j, _ in r.edgeworth_terms] == [3, 4, 5]

    def test_symmetric_only_even_terms(self):
        r = corrected_density(SymmetricPareto.standard(6.5), 0.7, 10)
        assert [j for j, _ in r.edgeworth_terms] == [4, 6]

    def test_max_order(self):
        r = corrected_density(SymmetricPareto.standard(6.5), 0.7, 10, max_order=0)
        assert r.edgeworth_terms == [] and r.total == pytest.approx(r.gaussian + r.correction, rel=1e-15)

    @given(st.floats(0.01, 4), st.integers(2, 500))
    @settings(max_examples=30, deadline=None)
    def test_symmetric_even_in_x(self, x, n):
        p = SymmetricPareto.standard(3)
        assert corrected_density(p, -x, n).total == pytest.approx(corrected_density(p, x, n).total, rel=1e-14)

    def test_mirror_rule(self):
        t = TwoSided(3.5, 4.5, SlowlyVarying.constant(1), SlowlyVarying.constant(2)).standardize()
        r = corrected_density(t, -1.1, 30)
        m = corrected_density(t.mirrored(), 1.1, 30)
        assert r.total == pytest.approx(m.total, rel=1e-14)
        assert r.case_tag == "case3-non-integer"

    def test_clamp(self):
        p = SymmetricRV(3, SlowlyVarying.log_power(1)).standardize()
        r = corrected_density(p, 0.0, 20)
        assert r.clamped and math.isfinite(r.total)
        assert not corrected_density(p, 10 * X_CLAMP, 20).clamped

    def test_tends_to_gaussian(self):
        p = SymmetricPareto.standard(3)
        r = corrected_density(p, 0.5, 10**8)
        assert r.total == pytest.approx(float(gaussian(0.5)), rel=1e-3)

    @pytest.mark.parametrize("n", [10, 50])
    def test_mass(self, n):
        p = SymmetricPareto.standard(3)
        xs = np.linspace(-8, 8, 401)
        ys = [corrected_density(p, x, n).total for x in xs]
        assert integrate.simpson(ys, x=xs) == pytest.approx(1.0, abs=0.02)

    def test_errors(self):
        p = SymmetricPareto.standard(3)
        with pytest.raises(DomainError):
            corrected_density(p, 1.0, 0)
        with pytest.raises(DomainError):
            corrected_density(SymmetricPareto(3, 1.0, 1.0), 1.0, 5)


class TestTailFormulas:
    def test_tail_equivalent_power_law(self):
        p = SymmetricPareto.standard(3)
        assert tail_equivalent(p, 8.0, 50) / tail_equivalent(p, 4.0, 50) == pytest.approx(2.0**-4, rel=1e-14)

    def test_tail_equivalent_even(self):
        with pytest.raises(DomainError):
            tail_equivalent(SymmetricPareto.standard(4), 5.0, 50)

    @pytest.mark.parametrize("alpha", [2.5, 3])
    def test_large_x_blend(self, alpha):
        p = SymmetricPareto.standard(alpha)
        xs = np.linspace(4, 10, 13)
        r = np.array([corrected_density(p, x, 50).total / tail_equivalent(p, x, 50) for x in xs])
        assert np.all(np.diff(np.abs(r - 1)) < 0)
        assert abs(r[-1] - 1) < 0.15

    def test_rozovskii_dominance(self):
        p = SymmetricPareto.standard(3)
        n = 100
        x_raw = 10 * math.sqrt(n)
        gauss = rozovskii_tail(p, x_raw, n) - n * p.tail_probability(x_raw)
        assert n * p.tail_probability(x_raw) >= 10 * gauss

    def test_rozovskii_small(self):
        p = SymmetricPareto.standard(3)
        assert rozovskii_tail(p, 1e-6, 10) == pytest.approx(0.5 + 10 * 0.5, rel=1e-5)

    def test_moderate_bound(self):
        assert moderate_region_bound(3, math.e) == pytest.approx(1.0, rel=1e-15)
        assert moderate_region_bound(4, 100) == pytest.approx(3.0348, abs=1e-4)
        assert moderate_region_bound(3.5, 50) < moderate_region_bound(4, 50) < moderate_region_bound(4, 51)
        with pytest.raises(DomainError):
            moderate_region_bound(2.0, 10)
        with pytest.raises(DomainError):
            moderate_region_bound(3.0, 1)
