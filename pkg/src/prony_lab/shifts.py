"""Reconstruction of ``F(x) = sum_j a_j f(x - x_j)`` for a known kernel ``f``.

Moment case: polynomials ``psi_k(t) = sum_{l<=k} C[k, l] t**l`` with
``int f(t - x) psi_k(t) dt = x**k`` turn the moments of ``F`` into generalized
moments ``M_k = sum_l C[k, l] m_l = sum_j a_j x_j**k``.

Fourier case: harmonics are self-dual up to the factor ``1/f_hat(k)``, so
``M_k = c_k(F) / f_hat(k) = sum_j a_j exp(i k x_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroFourierCoefficient, ZeroMeanKernel
from .polyalg import binomial_table
from .prony import PronySolution, solve_prony_1d


@dataclass(frozen=True)
class KernelMoments:
    """Moments ``mu_p = int t**p f(t) dt`` of the base function, ``p = 0..K``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values))
        if v.size < 1 or not np.all(np.isfinite(v)):
            raise ValueError("kernel moments must be finite and nonempty")
        if v[0] == 0:
            raise ZeroMeanKernel("kernel has zero mean; no dual system exists")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DualCoefficients:
    """Lower-triangular ``C[k, l]``, ``0 <= l <= k <= K``."""

    C: np.ndarray

    @property
    def order(self) -> int:
        return self.C.shape[0] - 1

    def polynomial(self, k: int) -> np.ndarray:
        """Ascending coefficients of ``psi_k``."""
        return self.C[k, : k + 1]


@dataclass(frozen=True)
class FourierMeasurements:
    """Fourier coefficients ``c_k(F) = int F(x) exp(i k x) dx`` and kernel
    transform values ``f_hat(k)`` for ``k = 0..K-1``."""

    coefficients: np.ndarray
    kernel_transform: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        f = np.atleast_1d(np.asarray(self.kernel_transform, dtype=complex))
        if c.shape != f.shape:
            raise ValueError("coefficients and kernel transform must align")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "kernel_transform", f)


def dual_coefficients(km: KernelMoments, K: int) -> DualCoefficients:
    """Solve ``sum_{l>=q} C[k, l] binom(l, q) mu_{l-q} = delta_{qk}`` for every
    ``k <= K`` by back substitution (the system is triangular with diagonal
    ``mu_0``)."""
    mu = km.values
    if mu.size < K + 1:
        raise ValueError(f"need kernel moments up to order {K}")
    if mu[0] == 0:
        raise ZeroMeanKernel("kernel has zero mean")
    B = binomial_table(K)
    dtype = np.result_type(mu.dtype, float)
    C = np.zeros((K + 1, K + 1), dtype=dtype)
    for k in range(K + 1):
        for q in range(k, -1, -1):
            acc = 1.0 if q == k else 0.0
            for l in range(q + 1, k + 1):
                acc -= C[k, l] * B[l, q] * mu[l - q]
            C[k, q] = acc / mu[0]
    return DualCoefficients(C)


def generalized_moments(C: DualCoefficients, m) -> np.ndarray:
    """``M_k = sum_{l<=k} C[k, l] m_l`` for every ``k`` both inputs cover."""
    m = np.asarray(m)
    K = min(C.order + 1, m.size)
    return C.C[:K, :K] @ m[:K]


def recover_shifts_from_moments(km: KernelMoments, m, N: int,
                                **solver_options) -> PronySolution:
    m = np.asarray(m)
    if m.size < 2 * N:
        raise ValueError(f"need {2 * N} moments, got {m.size}")
    C = dual_coefficients(km, 2 * N - 1)
    return solve_prony_1d(generalized_moments(C, m), N, **solver_options)


def recover_shifts_from_fourier(fm: FourierMeasurements, N: int,
                                zero_tol: float = 1e-14,
                                **solver_options) -> PronySolution:
    """Shifts as nodes ``exp(i x_j)`` on the unit circle.

    Recovered nodes are projected radially onto the circle; use
    :func:`shifts_from_nodes` for the shifts themselves.
    """
    K = 2 * N
    if fm.coefficients.size < K:
        raise ValueError(f"need {K} Fourier coefficients, got {fm.coefficients.size}")
    fhat = fm.kernel_transform[:K]
    scale = max(np.max(np.abs(fhat)), np.finfo(float).tiny)
    bad = np.flatnonzero(np.abs(fhat) <= zero_tol * scale)
    if bad.size:
        raise ZeroFourierCoefficient(f"f_hat vanishes at k = {bad.tolist()}")
    M = fm.coefficients[:K] / fhat
    sol = solve_prony_1d(M, N, **solver_options)
    rho = sol.nodes / np.abs(sol.nodes)
    return PronySolution(rho, sol.amplitudes)


def shifts_from_nodes(sol: PronySolution) -> np.ndarray:
    """Arguments of unit-circle nodes, in ``(-pi, pi]``, in node order."""
    x = np.angle(sol.nodes)
    return np.where(x <= -np.pi, x + 2 * np.pi, x)
