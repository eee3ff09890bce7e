"""Piecewise D-finite front end.

A function ``f`` whose pieces are annihilated by a known operator
``D = sum_j (sum_i a_{i,j} x**i) d^j/dx^j`` has ``D f`` supported on its
discontinuities, so the moments of ``D f`` satisfy a confluent Prony system.
Those moments are linear combinations of the moments of ``f``:

    m_k(D f) = sum_{j,i} a_{i,j} (-1)**j FF(k+i, j) m_{k+i-j}(f)

(integration by parts, ``f`` extended by zero outside its support so no
boundary terms survive; ``FF`` is the falling factorial).

For piecewise-constant signals (``D = d/dx``) the pieces are recovered too, by
cumulative summation of the jump magnitudes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentJumps, InsufficientMoments
from .polyalg import falling_factorial
from .prony import ConfluentPronySolution, solve_confluent_prony


@dataclass(frozen=True)
class DifferentialOperator:
    """``coefficients[j][i]`` is the coefficient of ``x**i d^j/dx^j``."""

    coefficients: tuple

    def __post_init__(self):
        coefs = tuple(np.atleast_1d(np.asarray(c, dtype=float)) for c in self.coefficients)
        if not coefs or not np.any(coefs[-1] != 0):
            raise ValueError("highest-order coefficient must not vanish identically")
        object.__setattr__(self, "coefficients", coefs)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def derivative(cls, order: int = 1) -> DifferentialOperator:
        return cls(tuple([[0.0]] * order + [[1.0]]))

    @classmethod
    def identity(cls) -> DifferentialOperator:
        return cls(([1.0],))

    def terms(self):
        """Nonzero ``(i, j, a_{i,j})`` triples."""
        for j, c in enumerate(self.coefficients):
            for i, a in enumerate(c):
                if a != 0:
                    yield i, j, a


def required_moments(D: DifferentialOperator, K: int) -> int:
    """Number of moments of ``f`` needed for ``K`` moments of ``D f``."""
    return max(0, max(K + i - j for i, j, _ in D.terms()))


def operator_moment_transform(D: DifferentialOperator, m, K: int) -> np.ndarray:
    """Moments ``m_0..m_{K-1}`` of ``D f`` from the moments of ``f``."""
    m = np.asarray(m)
    need = required_moments(D, K)
    if m.size < need:
        raise InsufficientMoments(f"need {need} moments of f, got {m.size}")
    out = np.zeros(K, dtype=np.result_type(m.dtype, float))
    k = np.arange(K)
    for i, j, a in D.terms():
        idx = k + i - j
        ff = falling_factorial(k + i, j)
        ok = idx >= 0
        out[ok] += a * (-1) ** j * ff[ok] * m[idx[ok]]
    return out


def recover_jumps_given_operator(D: DifferentialOperator, m, multiplicities=None, *,
                                 jump_count: int | None = None,
                                 **solver_options) -> ConfluentPronySolution:
    """Discontinuity locations and jump data of ``f`` from its moments.

    ``multiplicities`` lists ``l_j`` per jump in increasing location order; if
    omitted, ``jump_count`` jumps of multiplicity ``D.order`` are assumed.
    The returned amplitudes are the coefficients of the confluent system for
    the moments of ``D f``.
    """
    if multiplicities is None:
        if jump_count is None:
            raise ValueError("give multiplicities or jump_count")
        multiplicities = (D.order,) * jump_count
    L = sum(multiplicities)
    mD = operator_moment_transform(D, m, 2 * L)
    return solve_confluent_prony(mD, multiplicities, **solver_options)


@dataclass(frozen=True)
class PiecewiseConstantSignal:
    """Zero-extended piecewise-constant signal.

    ``values[i]`` holds on ``[jumps[i], jumps[i+1])``; the signal vanishes left
    of ``jumps[0]`` and right of ``jumps[-1]``.
    """

    jumps: np.ndarray
    values: np.ndarray
    support: tuple | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        xi = np.atleast_1d(np.asarray(self.jumps, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if xi.size and v.size != xi.size - 1:
            raise ValueError("need one value between each pair of jumps")
        if not xi.size and v.size:
            raise ValueError("values without jumps")
        if np.any(np.diff(xi) <= 0):
            raise ValueError("jump points must be strictly increasing")
        object.__setattr__(self, "jumps", xi)
        object.__setattr__(self, "values", v)
        if self.support is None and xi.size:
            object.__setattr__(self, "support", (float(xi[0]), float(xi[-1])))

    @classmethod
    def from_pieces(cls, breakpoints, values):
        """Signal equal to ``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``."""
        return cls(np.asarray(breakpoints, dtype=float), np.asarray(values, dtype=float),
                   (float(breakpoints[0]), float(breakpoints[-1])))

    @property
    def magnitudes(self) -> np.ndarray:
        """``f(xi+) - f(xi-)`` at every jump."""
        if not self.jumps.size:
            return np.zeros(0)
        padded = np.concatenate([[0.0], self.values, [0.0]])
        return np.diff(padded)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for lo, hi, v in zip(self.jumps[:-1], self.jumps[1:], self.values):
            out[(x >= lo) & (x < hi)] = v
        return out

    def moments(self, K: int) -> np.ndarray:
        """Closed-form ``int x**k f(x) dx``, ``k = 0..K-1``."""
        k = np.arange(K)
        out = np.zeros(K)
        for lo, hi, v in zip(self.jumps[:-1], self.jumps[1:], self.values):
            out += v * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
        return out

    def integral(self) -> float:
        return float(np.sum(np.diff(self.jumps) * self.values)) if self.jumps.size else 0.0


def l2_distance(f: PiecewiseConstantSignal, g: PiecewiseConstantSignal) -> float:
    """Exact ``||f - g||_2`` for two piecewise-constant signals."""
    pts = np.unique(np.concatenate([f.jumps, g.jumps]))
    if pts.size < 2:
        return 0.0
    mid = 0.5 * (pts[:-1] + pts[1:])
    d = f(mid) - g(mid)
    return float(np.sqrt(np.sum(d ** 2 * np.diff(pts))))


def l2_norm(f: PiecewiseConstantSignal) -> float:
    return float(np.sqrt(np.sum(f.values ** 2 * np.diff(f.jumps)))) if f.jumps.size else 0.0


def fit_piecewise_constant(sig: PiecewiseConstantSignal, m, max_iter: int = 20):
    """Gauss-Newton fit of jump locations and piece values to all moments ``m``.

    Parameterising by piece values keeps the jump magnitudes summing to zero.
    Iterates that reorder the jumps are rejected; the best residual wins.
    """
    m = np.asarray(m, dtype=float)
    K = m.size
    k = np.arange(K)
    xi, v = sig.jumps.copy(), sig.values.copy()
    n = xi.size

    def jacobian(xi, v):
        cols = []
        padded = np.concatenate([[0.0], v, [0.0]])
        for j in range(n):
            cols.append((padded[j] - padded[j + 1]) * xi[j] ** k)
        for i in range(n - 1):
            cols.append((xi[i + 1] ** (k + 1) - xi[i] ** (k + 1)) / (k + 1))
        return np.column_stack(cols)

    def residual(xi, v):
        return PiecewiseConstantSignal(xi, v).moments(K) - m

    r = residual(xi, v)
    best = (np.linalg.norm(r), xi, v)
    for _ in range(max_iter):
        step = np.linalg.lstsq(jacobian(xi, v), -r, rcond=None)[0]
        xi, v = xi + step[:n], v + step[n:]
        if not np.all(np.isfinite(step)) or np.any(np.diff(xi) <= 0):
            break
        r = residual(xi, v)
        rn = np.linalg.norm(r)
        if rn < best[0]:
            best = (rn, xi, v)
        if np.linalg.norm(step) <= 8 * np.finfo(float).eps * (1 + np.linalg.norm(xi)):
            break
    return PiecewiseConstantSignal(best[1], best[2], sig.support)


def reconstruct_piecewise_constant(m, jump_count: int, *, jump_sum_tol: float = 1e-8,
                                   refine: bool = True, **solver_options) -> PiecewiseConstantSignal:
    """Piecewise-constant signal with ``jump_count`` jumps from its moments.

    ``jump_count`` counts every jump of the zero-extended signal, boundary
    jumps included. Jump locations and magnitudes come from the Prony system
    for the moments of ``f'``; piece values are cumulative sums of the
    magnitudes. Diagnostics report the sum of magnitudes, the mismatch of the
    integral with ``m_0`` and the residuals on all supplied moments.

    The Prony step only consumes the first ``2 * jump_count - 1`` moments;
    with ``refine`` the result is polished by :func:`fit_piecewise_constant`
    against every supplied moment.

    Raises
    ------
    InconsistentJumps
        The magnitudes do not sum to zero within ``jump_sum_tol`` (relative to
        the largest magnitude), or the jumps are not real.
    """
    m = np.asarray(m, dtype=float)
    n = int(jump_count)
    if n == 0:
        return PiecewiseConstantSignal(np.zeros(0), np.zeros(0),
                                       diagnostics={"moment_residual": float(np.max(np.abs(m), initial=0))})
    if m.size < 2 * n + 1:
        raise InsufficientMoments(f"need {2 * n + 1} moments, got {m.size}")
    sol = recover_jumps_given_operator(DifferentialOperator.derivative(1), m, (1,) * n,
                                       **solver_options)
    xi, a = sol.nodes, sol.flat_amplitudes
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(xi.imag)) > 0 or np.max(np.abs(a.imag)) > 1e-12 * scale:
        raise InconsistentJumps("recovered jumps are not real")
    xi, a = xi.real, a.real
    jump_sum = float(np.sum(a))
    if abs(jump_sum) > jump_sum_tol * scale:
        raise InconsistentJumps(f"jump magnitudes sum to {jump_sum:.3e}, not 0")
    values = np.cumsum(a)[:-1]
    sig = PiecewiseConstantSignal(xi, values)
    if refine:
        sig = fit_piecewise_constant(sig, m)
        a = sig.magnitudes
        jump_sum = float(np.sum(a))
    fitted = sig.moments(m.size)
    sig.diagnostics.update(
        jump_magnitudes=a.tolist(),
        jump_sum=jump_sum,
        mass_residual=float(sig.integral() - m[0]),
        moment_residual=float(np.max(np.abs(fitted - m))),
    )
    return sig
