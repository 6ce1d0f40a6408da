"""Reference engines that never touch the expansion code.

* ``charfn_numeric``: quadrature of E exp(i theta X), with the oscillatory
  tails handled by QUADPACK's Fourier-integral routine.
* ``density_by_inversion``: Fourier inversion of phi(theta/sqrt n)^n on fixed
  Gauss-Legendre panels, reused across all x for a given n.
* ``tail_by_inversion``: P(S_n/sqrt(n) > x) from the same grid (Gil-Pelaez).
* ``density_by_convolution``: n-fold convolution of the sampled density by FFT.
* ``sample_sum`` / ``mc_density``: seeded Monte Carlo of S_n / sqrt(n).
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline, PchipInterpolator

from .density_model import DensitySpec
from .errors import QuadratureNonConvergence


@dataclass(frozen=True)
class OracleConfig:
    quad_abs_tol: float = 1e-10
    quad_panel_limit: int = 400
    inversion_theta_cutoff: float | None = None  # None: stop when |phi|^n < inversion_tail_tol
    inversion_tail_tol: float = 1e-14
    inversion_theta_max: float = 400.0
    mc_samples: int = 1_000_000
    mc_seed: int = 20240611
    mc_chunk: int = 250_000
    histogram_bins: float = 0.2  # bin width
    workers: int | None = None

    def __post_init__(self):
        if not (self.quad_abs_tol > 0 and self.inversion_tail_tol > 0 and self.histogram_bins > 0):
            raise ValueError("tolerances and bin width must be positive")
        if self.mc_samples < 1 or self.mc_chunk < 1:
            raise ValueError("sample counts must be positive")


DEFAULT = OracleConfig()


def worker_count(config: OracleConfig = DEFAULT) -> int:
    if config.workers is not None:
        return max(1, config.workers)
    env = os.environ.get("HEAVY_EDGEWORTH_WORKERS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _quad(f, a, b, limit, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(f, a, b, limit=limit, **kw)[0]
        except integrate.IntegrationWarning as exc:
            msg = str(exc)
            if "maximum number of subdivisions" in msg or "cycles" in msg:
                raise QuadratureNonConvergence(msg) from exc
            # roundoff at the requested floor: accept the estimate
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.quad(f, a, b, limit=limit, **kw)[0]


# --------------------------------------------------------------------------
# characteristic function


_INV_FACT = [1.0 / math.factorial(j) for j in range(60)]


def _series_tail(u: float, start: int) -> float:
    # sum_{j >= start, step 2} (-1)^(j//2) u^j / j!
    acc, j = 0.0, start
    term = u**j
    while j < start + 40:
        acc += (-1) ** (j // 2) * term * _INV_FACT[j]
        if abs(term * _INV_FACT[j]) < 1e-18 * abs(acc):
            break
        term *= u * u
        j += 2
    return acc


def _cos_rem(u: float, order: int) -> float:
    """cos u minus its Taylor polynomial through degree ``order``."""
    if order < 2:
        s = math.sin(0.5 * u)
        return -2.0 * s * s if order >= 0 else math.cos(u)
    if abs(u) < 1.5:
        return _series_tail(u, order + 1 + (order + 1) % 2)
    out = math.cos(u)
    for j in range(0, order + 1, 2):
        out -= (-1) ** (j // 2) * u**j * _INV_FACT[j]
    return out


def _sin_rem(u: float, order: int) -> float:
    """sin u minus its Taylor polynomial through degree ``order``."""
    if order < 1:
        return math.sin(u)
    if abs(u) < 1.5:
        return _series_tail(u, order + 1 + order % 2)
    out = math.sin(u)
    for j in range(1, order + 1, 2):
        out -= (-1) ** (j // 2) * u**j * _INV_FACT[j]
    return out


def _tail_moment(f, j: int, X: float, lim: int) -> float:
    """int_X^inf x^j f(x) dx via x = X/u.

    QAGI on [X, inf) silently loses everything once the integrand decays
    slowly from a large X; on (0, 1] the tail becomes a mild endpoint
    singularity that QAGS extrapolates away.
    """
    g = lambda u: X ** (j + 1) * u ** (-j - 2) * f(X / u) if u > 0 else 0.0
    return _quad(g, 0.0, 1.0, lim, epsabs=0.0, epsrel=1e-12)


def charfn_remainder(spec: DensitySpec, theta: float, order: int = 0,
                     config: OracleConfig = DEFAULT) -> complex:
    """E[exp(i theta X) - sum_{j<=order} (i theta X)^j / j!] without cancellation.

    ``order`` must stay below the tail index.  With order 0 this is phi - 1.
    """
    if theta == 0:
        return 0j
    if theta < 0:
        return charfn_remainder(spec, -theta, order, config).conjugate()
    lim = config.quad_panel_limit
    X = 25.0 / theta  # core |x| <= X, at most ~4 oscillations
    cuts = [0.0, *spec.breakpoints()]
    c = 1.0
    while c < X:
        cuts += [c, -c]
        c *= 4.0
    cuts = sorted({p for p in cuts if -X < p < X} | {-X, X})
    # the remainder is O(theta^min(order+1, alpha)); tolerances follow that scale
    eps = max(1e-15 * theta ** min(order + 1, spec.alpha), 1e-300)
    re = im = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        re += _quad(lambda x: _cos_rem(theta * x, order) * spec.pdf(x), a, b, lim,
                    epsabs=eps, epsrel=1e-13)
        if not spec.symmetric:
            im += _quad(lambda x: _sin_rem(theta * x, order) * spec.pdf(x), a, b, lim,
                        epsabs=eps, epsrel=1e-13)
    # tails |x| > X: oscillatory parts by QAWF, polynomial parts as tail moments
    scale = spec.pdf(X) / theta
    # the whole tail piece is O(scale); its error barely registers in the total
    tol = max(1e-10 * scale, 1e-300)
    fp = lambda x: spec.pdf(x)
    fm = lambda x: spec.pdf(-x)
    re += _quad(fp, X, np.inf, lim, weight="cos", wvar=theta, epsabs=tol, limlst=200)
    re += _quad(fm, X, np.inf, lim, weight="cos", wvar=theta, epsabs=tol, limlst=200)
    if not spec.symmetric:
        im += _quad(fp, X, np.inf, lim, weight="sin", wvar=theta, epsabs=tol, limlst=200)
        im -= _quad(fm, X, np.inf, lim, weight="sin", wvar=theta, epsabs=tol, limlst=200)
    for j in range(order + 1):
        tp = _tail_moment(fp, j, X, lim)
        tm = _tail_moment(fm, j, X, lim)
        coef = theta**j / math.factorial(j)
        if j % 2 == 0:
            re -= (-1) ** (j // 2) * coef * (tp + tm)
        elif not spec.symmetric:
            im -= (-1) ** (j // 2) * coef * (tp - tm)
    return complex(re, im)


def charfn_numeric(spec: DensitySpec, theta: float, config: OracleConfig = DEFAULT) -> complex:
    """phi(theta) = E exp(i theta X) by quadrature."""
    if theta == 0:
        return 1.0 + 0j
    return 1.0 + charfn_remainder(spec, theta, 0, config)


# --------------------------------------------------------------------------
# Fourier inversion

_GL20 = np.polynomial.legendre.leggauss(24)


def _panel_nodes(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = _GL20
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


class _InversionGrid:
    """theta nodes/weights and phi(theta/sqrt n)^n for one (spec, n)."""

    def __init__(self, spec: DensitySpec, n: int, config: OracleConfig):
        sq = math.sqrt(n)
        edges = [0.0, 1e-3, 1e-2, 0.05, 0.15, 0.3, 0.5]
        nodes, weights, vals = [], [], []

        def add(a, b):
            th, w = _panel_nodes(a, b)
            phi = np.array([charfn_numeric(spec, t / sq, config) for t in th])
            nodes.append(th)
            weights.append(w)
            vals.append(phi**n)
            return np.max(np.abs(phi) ** n)

        for a, b in zip(edges[:-1], edges[1:]):
            add(a, b)
        a, width = edges[-1], 0.5
        cutoff = config.inversion_theta_cutoff
        while True:
            peak = add(a, a + width)
            a += width
            if cutoff is not None:
                if a >= cutoff:
                    break
            elif peak < config.inversion_tail_tol and a > 4.0:
                break
            if a > config.inversion_theta_max:
                raise QuadratureNonConvergence(
                    f"|phi|^n still {peak:.2e} at theta={a}; raise inversion_theta_max")
        self.theta = np.concatenate(nodes)
        self.weights = np.concatenate(weights)
        self.values = np.concatenate(vals)

    def density(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ph = np.exp(-1j * np.outer(x, self.theta))
        return (ph * self.values).real @ self.weights / math.pi

    def upper_tail(self, x) -> np.ndarray:
        # Gil-Pelaez: 1/2 + (1/pi) int_0^inf Im(exp(-i theta x) phi_n(theta)) / theta
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ph = np.exp(-1j * np.outer(x, self.theta))
        return 0.5 + (ph * self.values).imag @ (self.weights / self.theta) / math.pi


_INV_CACHE: dict = {}


def _grid(spec: DensitySpec, n: int, config: OracleConfig) -> _InversionGrid:
    key = (id(spec), n, config)
    hit = _INV_CACHE.get(key)
    if hit is None or hit[0] is not spec:
        hit = (spec, _InversionGrid(spec, n, config))
        _INV_CACHE[key] = hit
    return hit[1]


def density_by_inversion(spec: DensitySpec, x, n: int, config: OracleConfig = DEFAULT):
    """(1/2pi) int exp(-i theta x) phi(theta/sqrt n)^n d theta."""
    out = _grid(spec, n, config).density(x)
    return out if np.ndim(x) else float(out[0])


def tail_by_inversion(spec: DensitySpec, x, n: int, config: OracleConfig = DEFAULT):
    """P(S_n/sqrt(n) > x) from the same theta grid as density_by_inversion."""
    out = _grid(spec, n, config).upper_tail(x)
    return out if np.ndim(x) else float(out[0])


# --------------------------------------------------------------------------
# n-fold convolution


def density_by_convolution(spec: DensitySpec, x, n: int, half_width: float = 500.0,
                           h: float = 0.05):
    """Density of S_n/sqrt(n) from the FFT power of the sampled density."""
    m = int(round(half_width / h))
    span = 2 * m * n + 1
    N = 1 << int(math.ceil(math.log2(span)))
    j = np.arange(-m, m + 1)
    f = np.zeros(N)
    f[j % N] = spec.pdf(j * h) * h
    g = np.fft.irfft(np.fft.rfft(f) ** n, N) / h
    k = np.arange(N)
    k = np.where(k > N // 2, k - N, k)
    order = np.argsort(k)
    grid_x, grid_g = k[order] * h, g[order]
    xs = np.asarray(x, dtype=float) * math.sqrt(n)
    # cubic spline on a window around the requested points; linear interpolation
    # would cap the accuracy at h^2 |g''| / 8
    lo = max(int(np.searchsorted(grid_x, np.min(xs))) - 8, 0)
    hi = min(int(np.searchsorted(grid_x, np.max(xs))) + 8, len(grid_x))
    out = math.sqrt(n) * CubicSpline(grid_x[lo:hi], grid_g[lo:hi])(xs)
    return out if np.ndim(x) else float(out)


# --------------------------------------------------------------------------
# Monte Carlo


class InverseCDF:
    """Tabulated quantile function: dense core on [-50, 50], log-spaced tails."""

    CORE = 50.0

    def __init__(self, spec: DensitySpec, h: float = 0.01):
        xs = np.arange(-self.CORE, self.CORE + h / 2, h)
        pts = spec.breakpoints()
        gx, gw = np.polynomial.legendre.leggauss(8)
        mid, half = 0.5 * (xs[:-1] + xs[1:]), 0.5 * h
        cells = half * (spec.pdf(mid[:, None] + half * gx[None, :]) @ gw)
        for p in pts:  # cells straddling a kink get adaptive quadrature
            i = int(np.searchsorted(xs, p)) - 1
            if 0 <= i < len(cells):
                cells[i] = integrate.quad(spec.pdf, xs[i], xs[i + 1], points=[p])[0]
        left = spec.tail_probability_left(-self.CORE)
        right = spec.tail_probability(self.CORE)
        cdf = left + np.concatenate([[0.0], np.cumsum(cells)])
        total = cdf[-1] + right
        self.core_x, self.core_F = xs, cdf / total
        self.p_left, self.p_right = left / total, right / total
        tx = np.geomspace(self.CORE, 1e15, 600)
        self._right = self._tail_table(spec, tx, total)
        self._left = self._tail_table(spec.mirrored(), tx, total)

    @staticmethod
    def _tail_table(spec, tx, total):
        s = np.array([spec.tail_probability(t) for t in tx]) / total
        s = np.maximum(s, 1e-300)
        # x as a function of -log S, increasing
        return PchipInterpolator(-np.log(s), np.log(tx), extrapolate=True)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        out = np.interp(u, self.core_F, self.core_x)
        lo = u < self.p_left
        hi = u > 1.0 - self.p_right
        if np.any(lo):
            out[lo] = -np.exp(self._left(-np.log(u[lo])))
        if np.any(hi):
            out[hi] = np.exp(self._right(-np.log1p(-u[hi])))
        return out


def _chunk_sums(icdf: InverseCDF, n: int, size: int, seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    acc = np.zeros(size)
    for _ in range(n):
        acc += icdf(rng.random(size))
    return acc / math.sqrt(n)


def iter_sample_chunks(spec: DensitySpec, n: int, config: OracleConfig = DEFAULT,
                       icdf: InverseCDF | None = None) -> Iterator[np.ndarray]:
    """Yield S_n/sqrt(n) draws chunk by chunk in a worker-count independent order."""
    icdf = icdf or InverseCDF(spec)
    total, size = config.mc_samples, config.mc_chunk
    sizes = [min(size, total - i) for i in range(0, total, size)]
    with ThreadPoolExecutor(worker_count(config)) as pool:
        futs = [pool.submit(_chunk_sums, icdf, n, s, config.mc_seed, i) for i, s in enumerate(sizes)]
        for f in futs:
            yield f.result()


def sample_sum(spec: DensitySpec, n: int, config: OracleConfig = DEFAULT) -> np.ndarray:
    """config.mc_samples iid draws of S_n/sqrt(n)."""
    return np.concatenate(list(iter_sample_chunks(spec, n, config)))


@dataclass(frozen=True)
class MCDensity:
    x: np.ndarray
    density: np.ndarray
    stderr: np.ndarray
    width: float


def mc_density(samples: np.ndarray, grid, config: OracleConfig = DEFAULT) -> MCDensity:
    """Histogram density with one bin of width config.histogram_bins centered at each grid point."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("no samples")
    grid = np.asarray(grid, dtype=float)
    w = config.histogram_bins
    srt = np.sort(samples)
    counts = np.searchsorted(srt, grid + w / 2) - np.searchsorted(srt, grid - w / 2)
    p = counts / samples.size
    return MCDensity(grid, p / w, np.sqrt(p * (1 - p) / samples.size) / w, w)
