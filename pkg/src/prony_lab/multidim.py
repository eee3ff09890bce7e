"""Multi-dimensional Prony system solved by separation of variables.

Restricting the moment generating function to the m-th coordinate axis gives
the one-dimensional generating function of the pairs ``(a_j, x^j_m)``. Each
axis is solved independently and the coordinates are glued into points by
matching amplitudes, which requires the amplitudes to be pairwise distinct.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousAmplitudes, InconsistentAxes
from .prony import solve_prony_1d

AMPLITUDE_SEPARATION = 1e-6
AXIS_TOL = 1e-6


def _amplitude_order(a):
    a = np.asarray(a, dtype=complex)
    return np.lexsort((a.imag, a.real))


@dataclass(frozen=True)
class MDPronySolution:
    """Points ``x^j`` (rows of ``points``, shape ``(N, d)``) with amplitudes
    ``a_j``, sorted by amplitude.

    Distinct amplitudes are needed to *solve* for a solution, not to evaluate
    one, so the constructor does not enforce them; see
    :meth:`amplitudes_distinct`.
    """

    points: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex)).ravel()
        x = np.asarray(self.points, dtype=complex)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != a.size:
            raise ValueError("one point per amplitude is required")
        p = _amplitude_order(a)
        object.__setattr__(self, "points", x[p])
        object.__setattr__(self, "amplitudes", a[p])

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def amplitudes_distinct(self, tol: float = AMPLITUDE_SEPARATION) -> bool:
        return _min_relative_gap(self.amplitudes) > tol


@dataclass(frozen=True)
class AxisMoments:
    """``values[m, r] = m_{r e_m}`` for axis ``m`` and ``r = 0..K-1``."""

    values: np.ndarray
    tol: float = field(default=AXIS_TOL, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.shape[1] < 2:
            raise ValueError("axis moments need shape (d, K) with K >= 2")
        if not np.all(np.isfinite(v)):
            raise ValueError("axis moments must be finite")
        m0 = v[:, 0]
        if np.max(np.abs(m0 - m0[0])) > self.tol * max(1.0, np.max(np.abs(m0))):
            raise InconsistentAxes("axes disagree on the zeroth moment")
        object.__setattr__(self, "values", v)

    @property
    def dimension(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


def md_moments(sol: MDPronySolution, k) -> complex:
    """``sum_j a_j prod_l (x^j_l)**k_l`` for the multi-index ``k``."""
    k = np.asarray(k, dtype=int)
    if k.shape != (sol.dimension,) or np.any(k < 0):
        raise ValueError("multi-index must be nonnegative with one entry per axis")
    return complex(np.prod(sol.points ** k[None, :], axis=1) @ sol.amplitudes)


def axis_moments(sol: MDPronySolution, K: int) -> AxisMoments:
    d = sol.dimension
    vals = np.empty((d, K), dtype=complex)
    for m in range(d):
        for r in range(K):
            k = np.zeros(d, dtype=int)
            k[m] = r
            vals[m, r] = md_moments(sol, k)
    return AxisMoments(vals)


def _min_relative_gap(a):
    a = np.asarray(a, dtype=complex)
    best = np.inf
    for i in range(a.size):
        for j in range(i + 1, a.size):
            scale = max(abs(a[i]), abs(a[j]))
            best = min(best, abs(a[i] - a[j]) / scale if scale > 0 else 0.0)
    return best


def solve_prony_md(am: AxisMoments, N: int, *,
                   amplitude_separation: float = AMPLITUDE_SEPARATION,
                   axis_tol: float = AXIS_TOL, **solver_options) -> MDPronySolution:
    """Recover ``N`` points and amplitudes from ``2N`` moments on every axis.

    Raises
    ------
    AmbiguousAmplitudes
        Two amplitudes recovered on some axis agree to ``amplitude_separation``
        (relative), so the coordinates cannot be matched across axes.
    InconsistentAxes
        The amplitude lists found on different axes disagree beyond ``axis_tol``.
    """
    if am.length < 2 * N:
        raise ValueError(f"each axis needs {2 * N} moments, got {am.length}")
    per_axis = [solve_prony_1d(am.values[m], N, **solver_options)
                for m in range(am.dimension)]

    amps, coords = [], []
    for sol in per_axis:
        if _min_relative_gap(sol.amplitudes) <= amplitude_separation:
            raise AmbiguousAmplitudes(
                "recovered amplitudes coincide; coordinates cannot be matched")
        p = _amplitude_order(sol.amplitudes)
        amps.append(sol.amplitudes[p])
        coords.append(sol.nodes[p])
    amps = np.array(amps)
    ref = amps[0]
    spread = np.max(np.abs(amps - ref[None, :]))
    if spread > axis_tol * max(1.0, np.max(np.abs(ref))):
        raise InconsistentAxes(
            f"amplitudes disagree across axes by {spread:.3e}")
    return MDPronySolution(np.column_stack(coords), amps.mean(axis=0))
