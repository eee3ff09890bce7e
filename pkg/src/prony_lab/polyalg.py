"""Small dense numerical kernel: polynomials, roots, Pade/Hankel solves and
(confluent) Vandermonde matrices.

Matrices are plain two-dimensional numpy arrays. All routines are pure
functions of their inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg

from .errors import DuplicateNodes, NoConvergence, SingularHankel, SingularMatrix

HANKEL_RANK_TOL = 1e-10
ROOT_TOL = 1e-12
ROOT_MAX_ITER = 500
CLUSTER_TOL = 1e-6


class Polynomial:
    """Polynomial with complex coefficients stored in ascending degree order.

    Exact trailing zeros are trimmed on construction; the zero polynomial
    keeps a single zero coefficient.
    """

    __slots__ = ("coef",)

    def __init__(self, coef):
        c = np.atleast_1d(np.asarray(coef, dtype=complex)).copy()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        self.coef = c

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        """Monic-times-``leading`` polynomial with the given roots."""
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coef.size - 1

    def is_zero(self) -> bool:
        return self.coef.size == 1 and self.coef[0] == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coef[::-1]:
            out = out * z + c
        return out

    def derivative(self) -> Polynomial:
        if self.degree == 0:
            return Polynomial([0])
        return Polynomial(self.coef[1:] * np.arange(1, self.coef.size))

    def trimmed(self, rtol: float) -> Polynomial:
        """Drop leading coefficients below ``rtol * max|coef|``."""
        scale = np.max(np.abs(self.coef))
        c = self.coef
        while c.size > 1 and abs(c[-1]) <= rtol * scale:
            c = c[:-1]
        return Polynomial(c)

    def reversed(self, degree: int | None = None) -> Polynomial:
        """``z**degree * p(1/z)``; ``degree`` defaults to the actual degree."""
        n = self.degree if degree is None else degree
        c = np.zeros(n + 1, dtype=complex)
        c[: self.coef.size] = self.coef
        return Polynomial(c[::-1])

    def __mul__(self, other: Polynomial) -> Polynomial:
        return Polynomial(np.convolve(self.coef, other.coef))

    def __repr__(self):
        return f"Polynomial({self.coef.tolist()!r})"


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residual: float
    iterations: int


def _relative_residual(coef, z):
    p = np.zeros_like(z)
    scale = np.zeros(z.shape)
    az = np.abs(z)
    for c in coef[::-1]:
        p = p * z + c
        scale = scale * az + abs(c)
    return np.abs(p) / np.where(scale > 0, scale, 1.0)


def find_roots(p: Polynomial, max_iter: int = ROOT_MAX_ITER, tol: float = ROOT_TOL,
               seed: int = 0) -> RootSet:
    """All complex roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    The starting ring is centred on the root centroid with radius equal to the
    geometric mean of the root moduli, and its angles are perturbed with a
    fixed-seed generator so that results are reproducible. Convergence is
    declared once every root has relative backward residual
    ``|p(z)| / sum_i |c_i| |z|**i`` below ``tol``.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    c = p.coef / p.coef[-1]
    if n == 1:
        r = np.array([-c[0]])
        return RootSet(r, float(_relative_residual(c, r).max()), 0)

    dp = np.arange(1, n + 1) * c[1:]
    rng = np.random.default_rng(seed)
    centre = -c[n - 1] / n
    radius = abs(c[0]) ** (1.0 / n) if c[0] != 0 else 1.0
    radius = max(radius, 1e-3 * max(1.0, abs(centre)))
    angles = 2 * np.pi * (np.arange(n) + 0.25 + 0.5 * rng.random(n)) / n
    z = centre + radius * np.exp(1j * angles)

    def horner(coef, x):
        out = np.zeros_like(x)
        for a in coef[::-1]:
            out = out * x + a
        return out

    res = _relative_residual(c, z)
    it = 0
    while it < max_iter and res.max() > tol:
        it += 1
        pz = horner(c, z)
        dpz = horner(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = (1.0 / diff).sum(axis=1) - 1.0
            step = w / (1.0 - w * s)
        step = np.where(np.isfinite(step), step, 0.0)
        # converged roots are frozen
        step[res <= tol] = 0.0
        z = z - step
        res = _relative_residual(c, z)
    if res.max() > tol:
        raise NoConvergence(
            f"Aberth iteration did not converge in {max_iter} steps "
            f"(residual {res.max():.3e})")
    # one polishing sweep, accepted root by root only if it does not hurt
    pz = horner(c, z)
    dpz = horner(dp, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0
        cand = z - w / (1.0 - w * s)
    ok = np.isfinite(cand)
    cand = np.where(ok, cand, z)
    better = _relative_residual(c, cand) <= res
    z = np.where(better, cand, z)
    z = _merge_multiple_roots(c, z)
    res = _relative_residual(c, z)
    return RootSet(z, float(res.max()), it)


def _merge_multiple_roots(c, z, tol: float = CLUSTER_TOL, mult_tol: float = 1e-10):
    """Replace a tight cluster of ``k`` roots by its mean when the mean is a
    ``k``-fold root, i.e. ``p, p', .., p^(k-1)`` all have relative backward
    residual below ``mult_tol`` there. A multiple root splits by
    ``O(eps**(1/k))`` under roundoff while the cluster mean stays accurate."""
    z = z.copy()
    for g in cluster_roots(z, tol):
        if g.size < 2:
            continue
        mean = np.array([z[g].mean()])
        d, ok = c, True
        for _ in range(g.size):
            if _relative_residual(d, mean)[0] > mult_tol:
                ok = False
                break
            d = d[1:] * np.arange(1, d.size)
        if ok:
            z[g] = mean[0]
    return z


def pade_from_moments(moments, n: int, rank_tol: float = HANKEL_RANK_TOL):
    """Pade approximant ``P/Q`` of type ``[n-1/n]`` of ``sum_k m_k z**k``.

    ``Q`` is normalised by ``Q(0) = 1``. The coefficients ``B_1..B_n`` of ``Q``
    solve the Hankel block of the linear system ``I(z) Q(z) = P(z)`` (the
    equations for ``z**n .. z**(2n-1)``); ``P`` then follows by truncated
    convolution.

    Raises
    ------
    SingularHankel
        If the pivoted QR of the Hankel block has effective rank below ``n``;
        the exception's ``rank`` attribute carries the detected rank.
    """
    m = np.asarray(moments, dtype=complex)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if m.size < 2 * n:
        raise ValueError(f"need at least {2 * n} moments, got {m.size}")
    if n == 0:
        return Polynomial([0]), Polynomial([1])

    rows = np.arange(n, 2 * n)[:, None]
    cols = np.arange(1, n + 1)[None, :]
    H = m[rows - cols]
    rhs = -m[n:2 * n]
    Qf, R, perm = scipy.linalg.qr(H, pivoting=True)
    d = np.abs(np.diag(R))
    rank = int(np.sum(d > rank_tol * d[0])) if d[0] > 0 else 0
    if rank < n:
        raise SingularHankel(
            f"Hankel system has effective rank {rank} < {n}", rank)
    y = scipy.linalg.solve_triangular(R, Qf.conj().T @ rhs)
    b = np.empty(n, dtype=complex)
    b[perm] = y
    B = np.concatenate([[1.0], b])
    A = np.convolve(m[:n], B)[:n]
    return Polynomial(A), Polynomial(B)


def cluster_roots(roots, tol: float = CLUSTER_TOL):
    """Group roots closer than ``tol`` relative distance (single linkage).

    Returns a list of index arrays, one per cluster.
    """
    z = np.asarray(roots, dtype=complex)
    n = z.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(z[i]), abs(z[j]))
            if abs(z[i] - z[j]) <= tol * scale:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in groups.values()]


def cluster_into(points, count: int):
    """Agglomerative single-linkage clustering of ``points`` into ``count`` groups."""
    z = np.asarray(points, dtype=complex)
    groups = [[i] for i in range(z.size)]
    if count < 1 or count > z.size:
        raise ValueError("invalid cluster count")
    while len(groups) > count:
        best = None
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                d = np.min(np.abs(z[groups[a]][:, None] - z[groups[b]][None, :]))
                if best is None or d < best[0]:
                    best = (d, a, b)
        _, a, b = best
        groups[a] = groups[a] + groups.pop(b)
    return [np.array(g) for g in groups]


def _check_distinct(nodes, tol):
    x = np.asarray(nodes, dtype=complex)
    for i in range(x.size):
        for j in range(i + 1, x.size):
            if abs(x[i] - x[j]) <= tol * max(1.0, abs(x[i]), abs(x[j])):
                raise DuplicateNodes(f"nodes {x[i]} and {x[j]} coincide")


def falling_factorial(n, i: int):
    """``n (n-1) ... (n-i+1)``, vectorised over integer ``n``."""
    n = np.asarray(n)
    out = np.ones(n.shape, dtype=float)
    for s in range(i):
        out = out * (n - s)
    return out


def confluent_vandermonde(nodes, multiplicities, rows: int,
                          tol: float = CLUSTER_TOL) -> np.ndarray:
    """Confluent Vandermonde matrix.

    Node ``x_j`` contributes ``multiplicities[j] + 1`` columns: the values
    ``x_j**k`` followed by the derivatives ``d^i/dx^i x**k`` at ``x_j`` for
    ``i = 1..multiplicities[j]``. Row ``k`` runs over ``0..rows-1``.
    """
    x = np.asarray(nodes, dtype=complex).ravel()
    mult = [int(l) for l in multiplicities]
    if len(mult) != x.size:
        raise ValueError("nodes and multiplicities differ in length")
    _check_distinct(x, tol)
    k = np.arange(rows)
    cols = []
    for xj, lj in zip(x, mult):
        for i in range(lj + 1):
            e = k - i
            col = np.zeros(rows, dtype=complex)
            ok = e >= 0
            col[ok] = falling_factorial(k[ok], i) * xj ** e[ok]
            cols.append(col)
    return np.column_stack(cols) if cols else np.zeros((rows, 0), dtype=complex)


def inf_norm_inverse(M) -> float:
    """``||M^{-1}||_inf`` (maximum absolute row sum of the inverse)."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if np.linalg.cond(M) > 1.0 / np.finfo(float).eps:
        raise SingularMatrix("matrix is numerically singular")
    inv = np.linalg.inv(M)
    return float(np.max(np.sum(np.abs(inv), axis=1)))


def gautschi_bound(nodes, tol: float = CLUSTER_TOL) -> float:
    """A-priori upper estimate of ``||V^{-1}||_inf`` for the confluent
    Vandermonde matrix with one derivative column per node.

    ``max_i b_i prod_{j != i} ((1 + |x_j|) / |x_i - x_j|)**2`` with
    ``b_i = max(1 + |x_i|, 1 + 2 (1 + |x_i|) sum_{j != i} 1 / |x_j - x_i|)``.
    """
    x = np.asarray(nodes, dtype=complex).ravel()
    if x.size == 0:
        raise ValueError("need at least one node")
    _check_distinct(x, tol)
    best = 0.0
    for i in range(x.size):
        others = np.delete(x, i)
        gaps = np.abs(x[i] - others)
        b = max(1 + abs(x[i]), 1 + 2 * (1 + abs(x[i])) * np.sum(1.0 / gaps))
        prod = np.prod(((1 + np.abs(others)) / gaps) ** 2)
        best = max(best, b * prod)
    return float(best)


def binomial_table(n: int) -> np.ndarray:
    """``T[l, q] = C(l, q)`` for ``0 <= q <= l <= n``."""
    T = np.zeros((n + 1, n + 1))
    for l in range(n + 1):
        for q in range(l + 1):
            T[l, q] = comb(l, q)
    return T
