"""Moments and Fourier coefficients of synthetic signals by quadrature.

Composite Gauss-Legendre on panels that respect the integrand's breakpoints;
the panel count is doubled until two successive estimates agree to ``tol``
(a Richardson-style error estimate). Piecewise-constant integrands use the
closed form instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import QuadratureNotConverged

GAUSS_POINTS = 10
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_POINTS)


def composite_gauss(fn, a: float, b: float, panels: int, breakpoints=()):
    """Integrate vector-valued ``fn(x) -> (len(x), p)`` on ``[a, b]``."""
    edges = np.unique(np.concatenate([[a, b], [t for t in breakpoints if a < t < b]]))
    out = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, int(np.ceil(panels * (hi - lo) / (b - a))))
        grid = np.linspace(lo, hi, n + 1)
        half = 0.5 * np.diff(grid)
        mid = 0.5 * (grid[:-1] + grid[1:])
        x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        w = (half[:, None] * _WEIGHTS[None, :]).ravel()
        out = out + w @ fn(x)
    return out


def adaptive_integrate(fn, a: float, b: float, panels: int = 64, tol: float = 1e-10,
                       breakpoints=(), max_panels: int = 1 << 16):
    """Double the panel count until successive estimates agree to
    ``tol * max(1, |I|)`` entry-wise. Returns ``(value, error_estimate, panels)``."""
    prev = composite_gauss(fn, a, b, panels, breakpoints)
    while True:
        panels *= 2
        cur = composite_gauss(fn, a, b, panels, breakpoints)
        err = np.abs(cur - prev)
        if np.all(err <= tol * np.maximum(1.0, np.abs(cur))):
            return cur, float(np.max(err)), panels
        if panels >= max_panels:
            raise QuadratureNotConverged(
                f"quadrature error {np.max(err):.3e} after {panels} panels")
        prev = cur


@dataclass(frozen=True)
class PiecewiseConstantIntegrand:
    breakpoints: tuple
    values: tuple
    kind: str = field(default="piecewise-constant", init=False)

    def __call__(self, x):
        out = np.zeros_like(x, dtype=float)
        for lo, hi, v in zip(self.breakpoints[:-1], self.breakpoints[1:], self.values):
            out[(x >= lo) & (x < hi)] = v
        return out

    def breaks(self):
        return tuple(self.breakpoints)


@dataclass(frozen=True)
class BoxShiftsIntegrand:
    """``sum_j a_j 1[x_j, x_j + width](x)``."""

    shifts: tuple
    amplitudes: tuple
    width: float = 1.0
    kind: str = field(default="box-shifts", init=False)

    def __call__(self, x):
        out = np.zeros_like(x, dtype=float)
        for s, a in zip(self.shifts, self.amplitudes):
            out += a * ((x >= s) & (x < s + self.width))
        return out

    def breaks(self):
        return tuple(self.shifts) + tuple(s + self.width for s in self.shifts)

    def kernel_moments(self, K: int) -> np.ndarray:
        """``int_0^width t**p dt`` for ``p = 0..K``."""
        p = np.arange(K + 1)
        return self.width ** (p + 1) / (p + 1)


@dataclass(frozen=True)
class GaussianShiftsIntegrand:
    """``sum_j a_j g(x - x_j)`` with ``g`` the ``2 pi``-periodised Gaussian of
    width ``sigma``, sampled on one period."""

    shifts: tuple
    amplitudes: tuple
    sigma: float = 0.3
    images: int = 4
    kind: str = field(default="gaussian-shifts", init=False)

    def __call__(self, x):
        out = np.zeros_like(x, dtype=float)
        for s, a in zip(self.shifts, self.amplitudes):
            for n in range(-self.images, self.images + 1):
                out += a * np.exp(-0.5 * ((x - s + 2 * np.pi * n) / self.sigma) ** 2)
        return out

    def breaks(self):
        return ()

    def kernel_transform(self, K: int) -> np.ndarray:
        """``int g(u) exp(i k u) du`` for ``k = 0..K-1``."""
        k = np.arange(K)
        return self.sigma * np.sqrt(2 * np.pi) * np.exp(-0.5 * (self.sigma * k) ** 2) + 0j


@dataclass(frozen=True)
class QuadratureSpec:
    integrand: object
    interval: tuple
    panels: int = 64
    kernel: str = "monomial"
    tol: float = 1e-10

    def __post_init__(self):
        if self.panels < 64:
            raise ValueError("panel count must be at least 64")
        if self.kernel not in ("monomial", "harmonic"):
            raise ValueError(f"unknown measurement kernel {self.kernel!r}")
        a, b = self.interval
        if not b > a:
            raise ValueError("interval must have positive length")


def _closed_form_piecewise(q: QuadratureSpec, K: int) -> np.ndarray:
    f = q.integrand
    k = np.arange(K)
    out = np.zeros(K, dtype=complex if q.kernel == "harmonic" else float)
    for lo, hi, v in zip(f.breakpoints[:-1], f.breakpoints[1:], f.values):
        lo, hi = max(lo, q.interval[0]), min(hi, q.interval[1])
        if hi <= lo:
            continue
        if q.kernel == "monomial":
            out += v * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                term = (np.exp(1j * k * hi) - np.exp(1j * k * lo)) / (1j * k)
            term[0] = hi - lo
            out += v * term
    return out


def compute_moments(q: QuadratureSpec, K: int, closed_form: bool = True) -> np.ndarray:
    """``int x**k F(x) dx`` (monomial) or ``int F(x) exp(i k x) dx`` (harmonic)
    over ``q.interval`` for ``k = 0..K-1``."""
    if closed_form and isinstance(q.integrand, PiecewiseConstantIntegrand):
        return _closed_form_piecewise(q, K)
    k = np.arange(K)
    a, b = q.interval
    f = q.integrand
    if q.kernel == "monomial":
        def fn(x):
            return f(x)[:, None] * x[:, None] ** k[None, :]
    else:
        def fn(x):
            return f(x)[:, None] * np.exp(1j * x[:, None] * k[None, :])
    value, _, _ = adaptive_integrate(fn, a, b, q.panels, q.tol, f.breaks())
    return value
