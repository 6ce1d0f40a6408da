import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from heavy_edgeworth.errors import DomainError
from heavy_edgeworth.special_functions import (
    dawson,
    dawson_derivative_polys,
    dawson_scaled_derivative,
    fourier_kernel_even_fn,
    fourier_kernel_odd_fn,
    hermite,
    parabolic_cylinder,
    pcf_gauss_integral,
)

KERNEL_ALPHAS = [2.5, 3, 4, 4.5, 5]
KERNEL_XS = [0.0, 0.7, 1.5, 3.0]


def direct_even(alpha, x):
    f = lambda t: math.cos(t * x) * t**alpha * math.exp(-t * t / 2)
    return 2 * integrate.quad(f, 0, 60, limit=400, epsabs=1e-14, epsrel=1e-12)[0]


def direct_odd(alpha, x):
    # int exp(-i t x) sign(t) |t|^a exp(-t^2/2) dt = -2i int_0^inf sin(t x) t^a exp(-t^2/2) dt
    f = lambda t: math.sin(t * x) * t**alpha * math.exp(-t * t / 2)
    return -2j * integrate.quad(f, 0, 60, limit=400, epsabs=1e-14, epsrel=1e-12)[0]


class TestHermite:
    def test_h3_at_2(self):
        assert hermite(3, 2.0) == pytest.approx(2.0)

    def test_h0(self):
        assert hermite(0, 5.0) == 1.0

    def test_h6_at_0(self):
        assert hermite(6, 0.0) == pytest.approx(-15.0)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            hermite(-1, 0.0)

    def test_matches_scipy(self):
        x = np.linspace(-4, 4, 33)
        for k in range(12):
            assert np.allclose(hermite(k, x), special.eval_hermitenorm(k, x), rtol=1e-12, atol=1e-9)

    @pytest.mark.parametrize("k", range(1, 11))
    def test_derivative_identity(self, k):
        x = np.linspace(-4, 4, 17)
        h = 1e-5
        fd = (hermite(k, x + h) - hermite(k, x - h)) / (2 * h)
        assert np.allclose(fd, k * hermite(k - 1, x), rtol=1e-6, atol=1e-6)


class TestDawson:
    def test_zero(self):
        assert dawson(0.0) == 0.0

    def test_one(self):
        ref = math.exp(-1) * integrate.quad(lambda t: math.exp(t * t), 0, 1)[0]
        assert dawson(1.0) == pytest.approx(ref, rel=1e-12)
        assert dawson(1.0) == pytest.approx(0.5380795, abs=1e-7)

    def test_against_scipy(self):
        z = np.linspace(-30, 30, 2001)
        assert np.allclose(dawson(z), special.dawsn(z), rtol=1e-12, atol=0)

    @given(st.floats(-30, 30, allow_nan=False))
    def test_odd(self, z):
        assert dawson(-z) == -dawson(z)

    def test_ode(self):
        z = np.linspace(-5, 5, 101)
        h = 1e-5
        fd = (dawson(z + h) - dawson(z - h)) / (2 * h)
        assert np.allclose(fd, 1 - 2 * z * dawson(z), atol=1e-8)


class TestDawsonDerivative:
    def test_order_zero_at_zero(self):
        assert dawson_scaled_derivative(0, 0.0) == 0.0

    def test_first_at_zero(self):
        assert dawson_scaled_derivative(1, 0.0) == pytest.approx(1 / math.sqrt(2), rel=1e-14)

    def test_third_against_finite_difference(self):
        e = lambda x: dawson(x / math.sqrt(2))
        h, x = 0.05, 1.5
        # 6th-order central stencil for the third derivative
        c = [(-4, -7 / 240), (-3, 3 / 10), (-2, -169 / 120), (-1, 61 / 30),
             (1, -61 / 30), (2, 169 / 120), (3, -3 / 10), (4, 7 / 240)]
        fd = sum(w * e(x + k * h) for k, w in c) / h**3
        assert dawson_scaled_derivative(3, x) == pytest.approx(fd, rel=1e-6)

    def test_poly_degrees(self):
        for n in range(21):
            polys = dawson_derivative_polys(n)
            assert len(polys.p_coeffs) - 1 == n
            assert polys.p_coeffs[-1] != 0

    @pytest.mark.parametrize("n", [4, 9, 15, 20])
    def test_high_order_by_quadrature(self, n):
        # E(x) = (1/sqrt2) int_0^inf exp(-t^2/2) sin(x t) dt, differentiated under the integral
        x = 1.3
        phase = lambda t: math.sin(x * t + n * math.pi / 2)
        ref = integrate.quad(lambda t: t**n * math.exp(-t * t / 2) * phase(t), 0, 60,
                             limit=400, epsabs=1e-15, epsrel=1e-12)[0] / math.sqrt(2)
        assert dawson_scaled_derivative(n, x) == pytest.approx(ref, rel=1e-8, abs=1e-12)

    def test_large_argument_frozen(self):
        # mpmath reference, 30 digits
        assert dawson_scaled_derivative(20, 10.0) == pytest.approx(0.04763107070726553, rel=1e-10)


class TestParabolicCylinder:
    @pytest.mark.parametrize("z", [0.0, 1.0, 2.0])
    def test_nu_zero(self, z):
        assert parabolic_cylinder(0.0, z) == pytest.approx(math.exp(-z * z / 4), rel=1e-12)

    def test_nu_one_at_zero(self):
        assert parabolic_cylinder(1.0, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_large_z(self):
        nu, z = 2.5, 8.0
        ratio = parabolic_cylinder(nu, z) / (z**nu * math.exp(-z * z / 4))
        assert abs(ratio - 1) < 0.05

    @pytest.mark.parametrize("nu", [-0.5, 0.3, 2.5, 4.5, 7.2, 10.0])
    @pytest.mark.parametrize("z", [-10.0, -3.0, -0.4, 0.0, 1.1, 5.0, 10.0])
    def test_against_mpmath(self, nu, z):
        ref = float(mpmath.pcfd(nu, z))
        assert parabolic_cylinder(nu, z) == pytest.approx(ref, rel=1e-9, abs=1e-300)

    def test_gauss_integral_matches_definition(self):
        nu, z = 3.5, 1.7
        f = lambda t: math.exp(-t * t / 2) * t**nu * math.cos(z * t - nu * math.pi / 2)
        ref = integrate.quad(f, 0, 60, limit=400, epsabs=1e-14)[0]
        assert pcf_gauss_integral(nu, z) == pytest.approx(ref, rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            parabolic_cylinder(-1.0, 0.5)


class TestKernels:
    @pytest.mark.parametrize("alpha", KERNEL_ALPHAS)
    @pytest.mark.parametrize("x", KERNEL_XS)
    def test_even_kernel_quadrature(self, alpha, x):
        assert fourier_kernel_even_fn(alpha, x) == pytest.approx(direct_even(alpha, x), rel=1e-6)

    @pytest.mark.parametrize("alpha", KERNEL_ALPHAS)
    @pytest.mark.parametrize("x", KERNEL_XS[1:])
    def test_odd_kernel_quadrature(self, alpha, x):
        val = fourier_kernel_odd_fn(alpha, x)
        ref = direct_odd(alpha, x)
        assert abs(val.real) < 1e-12
        assert val.imag == pytest.approx(ref.imag, rel=1e-6)

    def test_odd_kernel_zero_noninteger(self):
        assert fourier_kernel_odd_fn(3.5, 0.0) == 0

    @given(st.sampled_from(KERNEL_ALPHAS), st.floats(0, 4))
    @settings(max_examples=30, deadline=None)
    def test_parity_in_x(self, alpha, x):
        assert fourier_kernel_even_fn(alpha, -x) == pytest.approx(fourier_kernel_even_fn(alpha, x), rel=1e-12, abs=1e-15)
        assert fourier_kernel_odd_fn(alpha, -x) == pytest.approx(-fourier_kernel_odd_fn(alpha, x), rel=1e-12, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            fourier_kernel_even_fn(2.0, 0.1)
        with pytest.raises(DomainError):
            fourier_kernel_odd_fn(1.5, 0.1)
