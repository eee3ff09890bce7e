"""Forward and inverse maps of the one-dimensional classical and confluent
Prony systems.

Classical:  m_k = sum_j a_j x_j**k
Confluent:  m_k = sum_j sum_{i<l_j} a_{i,j} k(k-1)...(k-i+1) x_j**(k-i)

Moment sequences are plain 1-D numpy arrays (complex or real).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (AmplitudeBelowFloor, DuplicateNodes, MultiplicityMismatch,
                     NodeCollision)
from .polyalg import (CLUSTER_TOL, HANKEL_RANK_TOL, cluster_into,
                      cluster_roots, confluent_vandermonde, find_roots,
                      pade_from_moments)

AMPLITUDE_FLOOR = 1e-10
NODE_GAP = 1e-8
# The multiplicity pattern fixes the Pade order, so the rank test only has to
# catch exact degeneracy; the Gauss-Newton polish restores accuracy.
CONFLUENT_RANK_TOL = 1e-14


def canonical_order(nodes) -> np.ndarray:
    """Permutation sorting nodes by real part, ties broken by imaginary part."""
    x = np.asarray(nodes, dtype=complex)
    return np.lexsort((x.imag, x.real))


def _min_gap(x):
    if x.size < 2:
        return np.inf
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min()


@dataclass(frozen=True)
class PronySolution:
    """Nodes and amplitudes of a classical Prony system, in canonical order."""

    nodes: np.ndarray
    amplitudes: np.ndarray
    node_gap: float = field(default=NODE_GAP, repr=False, compare=False)
    amplitude_floor: float = field(default=AMPLITUDE_FLOOR, repr=False, compare=False)

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.nodes, dtype=complex)).ravel()
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex)).ravel()
        if x.shape != a.shape:
            raise ValueError("nodes and amplitudes must have the same length")
        if _min_gap(x) <= self.node_gap:
            raise DuplicateNodes("nodes must be pairwise distinct")
        if a.size and np.min(np.abs(a)) <= self.amplitude_floor:
            raise AmplitudeBelowFloor("amplitudes must be nonzero")
        p = canonical_order(x)
        object.__setattr__(self, "nodes", x[p])
        object.__setattr__(self, "amplitudes", a[p])

    @property
    def size(self) -> int:
        return self.nodes.size

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.nodes.imag) <= tol)
                    and np.all(np.abs(self.amplitudes.imag) <= tol))


@dataclass(frozen=True)
class ConfluentPronySolution:
    """Nodes ``x_j`` with multiplicities ``l_j`` and amplitude arrays
    ``a_{0,j} .. a_{l_j-1,j}``, in canonical node order."""

    nodes: np.ndarray
    amplitudes: tuple
    node_gap: float = field(default=NODE_GAP, repr=False, compare=False)
    amplitude_floor: float = field(default=AMPLITUDE_FLOOR, repr=False, compare=False)

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.nodes, dtype=complex)).ravel()
        amps = [np.atleast_1d(np.asarray(a, dtype=complex)).ravel() for a in self.amplitudes]
        if len(amps) != x.size:
            raise ValueError("one amplitude array per node is required")
        if any(a.size < 1 for a in amps):
            raise ValueError("multiplicities must be >= 1")
        if _min_gap(x) <= self.node_gap:
            raise DuplicateNodes("nodes must be pairwise distinct")
        if any(abs(a[-1]) <= self.amplitude_floor for a in amps):
            raise AmplitudeBelowFloor("highest amplitudes must be nonzero")
        p = canonical_order(x)
        object.__setattr__(self, "nodes", x[p])
        object.__setattr__(self, "amplitudes", tuple(amps[i] for i in p))

    @property
    def multiplicities(self) -> tuple:
        return tuple(a.size for a in self.amplitudes)

    @property
    def flat_amplitudes(self) -> np.ndarray:
        return np.concatenate(self.amplitudes) if self.amplitudes else np.zeros(0, complex)

    @classmethod
    def from_classical(cls, sol: PronySolution) -> ConfluentPronySolution:
        return cls(sol.nodes, tuple(np.array([a]) for a in sol.amplitudes))


def prony_moments(sol: PronySolution, K: int) -> np.ndarray:
    """``m_k = sum_j a_j x_j**k`` for ``k = 0..K-1`` (with ``0**0 = 1``)."""
    k = np.arange(K)
    return (sol.nodes[None, :] ** k[:, None]) @ sol.amplitudes


def confluent_moments(sol: ConfluentPronySolution, K: int) -> np.ndarray:
    V = confluent_vandermonde(sol.nodes, [l - 1 for l in sol.multiplicities], K,
                              tol=0.0)
    return V @ sol.flat_amplitudes


def _is_real_input(m):
    return np.isrealobj(m) or bool(np.all(np.asarray(m).imag == 0))


def _realify(x, amps, tol: float = CLUSTER_TOL):
    """Restore the symmetry of a real-input fit that the polish perturbs by
    roundoff: real nodes get real amplitudes and conjugate node pairs get
    exactly conjugate nodes and amplitudes."""
    x = np.asarray(x, dtype=complex).copy()
    amps = [np.asarray(a, dtype=complex).copy() for a in amps]
    used = np.zeros(x.size, dtype=bool)
    for i in range(x.size):
        if used[i]:
            continue
        used[i] = True
        scale = max(1.0, abs(x[i]))
        if abs(x[i].imag) <= tol * scale:
            x[i] = x[i].real
            amps[i] = amps[i].real.astype(complex)
            continue
        cand = [j for j in range(x.size) if not used[j]
                and amps[j].size == amps[i].size]
        if not cand:
            continue
        j = min(cand, key=lambda q: abs(x[q] - np.conj(x[i])))
        if abs(x[j] - np.conj(x[i])) <= tol * scale:
            x[i] = 0.5 * (x[i] + np.conj(x[j]))
            x[j] = np.conj(x[i])
            amps[i] = 0.5 * (amps[i] + np.conj(amps[j]))
            amps[j] = np.conj(amps[i])
            used[j] = True
    return x, amps


def symmetrize_conjugates(x, tol: float = CLUSTER_TOL) -> np.ndarray:
    """Snap nearly-real values to the real axis and nearly-conjugate pairs to
    exact conjugates."""
    x = np.asarray(x, dtype=complex).copy()
    used = np.zeros(x.size, dtype=bool)
    for i in range(x.size):
        if used[i]:
            continue
        scale = max(1.0, abs(x[i]))
        if abs(x[i].imag) <= tol * scale:
            x[i] = x[i].real
            used[i] = True
            continue
        cand = [j for j in range(x.size) if j != i and not used[j]]
        if not cand:
            continue
        j = min(cand, key=lambda q: abs(x[q] - np.conj(x[i])))
        if abs(x[j] - np.conj(x[i])) <= tol * scale:
            mid = 0.5 * (x[i] + np.conj(x[j]))
            x[i], x[j] = mid, np.conj(mid)
            used[i] = used[j] = True
    return x


def _denominator_nodes(m, L, rank_tol):
    """Reciprocal roots of the Pade denominator plus the number of nodes
    sitting at the origin (the degree deficit of ``Q``)."""
    _, Q = pade_from_moments(m[: 2 * L], L, rank_tol=rank_tol)
    Qt = Q.trimmed(HANKEL_RANK_TOL)
    deficit = L - Qt.degree
    if Qt.degree == 0:
        return np.zeros(0, dtype=complex), deficit
    roots = find_roots(Qt).roots
    return 1.0 / roots, deficit


def confluent_jacobian(nodes, multiplicities, amplitudes, K):
    """Jacobian of the confluent forward map with respect to
    ``(a_{0,j}, .., a_{l_j-1,j}, x_j)`` per node, node blocks in order."""
    cols = []
    for xj, lj, aj in zip(nodes, multiplicities, amplitudes):
        V = confluent_vandermonde([xj], [lj], K, tol=0.0)
        cols.append(V[:, :lj])
        cols.append((V[:, 1:] @ aj)[:, None])
    return np.hstack(cols)


def refine_confluent(nodes, multiplicities, amplitudes, m, max_iter: int = 12):
    """Gauss-Newton polish of a confluent (or classical, all ``l_j = 1``)
    solution against the moments ``m``.

    Full steps are taken (the Pade start often sits in a narrow valley where a
    residual-decrease test would reject the first step); the iterate with the
    smallest residual is returned, so a good start is never made worse.
    """
    x = np.asarray(nodes, dtype=complex).copy()
    amps = [np.asarray(a, dtype=complex).copy() for a in amplitudes]
    mult = list(multiplicities)
    K = len(m)
    eps = np.finfo(float).eps

    def residual(x, amps):
        V = confluent_vandermonde(x, [l - 1 for l in mult], K, tol=0.0)
        return V @ np.concatenate(amps) - m

    r = residual(x, amps)
    best = (np.linalg.norm(r), x, amps)
    stalled = 0
    for _ in range(max_iter):
        J = confluent_jacobian(x, mult, amps, K)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        new_amps, pos = [], 0
        x = x.copy()
        for j, lj in enumerate(mult):
            new_amps.append(amps[j] + step[pos:pos + lj])
            x[j] += step[pos + lj]
            pos += lj + 1
        amps = new_amps
        r = residual(x, amps)
        rn = np.linalg.norm(r)
        if rn < best[0]:
            best, stalled = (rn, x, amps), 0
        else:
            stalled += 1
        if stalled >= 2 or np.linalg.norm(step) <= 8 * eps * (1 + np.linalg.norm(x)):
            break
    return best[1], best[2]


def solve_prony_1d(m, N: int, *, amplitude_floor: float = AMPLITUDE_FLOOR,
                   node_gap: float = NODE_GAP, cluster_tol: float = CLUSTER_TOL,
                   rank_tol: float = HANKEL_RANK_TOL,
                   symmetrize: bool = True, refine: bool = True) -> PronySolution:
    """Solve the classical Prony system from the first ``2N`` moments.

    The moment generating function is recovered as a Pade approximant ``P/Q``;
    nodes are reciprocals of the roots of ``Q`` (nodes at the origin show up as
    a degree deficit of ``Q``) and amplitudes come from the least-squares
    Vandermonde fit on the same ``2N`` moments.

    Raises
    ------
    SingularHankel
        Propagated from the Pade step; ``rank`` hints at a smaller ``N``.
    NodeCollision
        Recovered nodes cluster, which points to a confluent model.
    AmplitudeBelowFloor
        Some recovered amplitude is negligible, i.e. ``N`` is overestimated.
    """
    m = np.asarray(m)
    if m.size < 2 * N:
        raise ValueError(f"need {2 * N} moments, got {m.size}")
    if N == 0:
        return PronySolution(np.zeros(0), np.zeros(0))
    m = m[: 2 * N].astype(complex)
    x, deficit = _denominator_nodes(m, N, rank_tol)
    if deficit > 1:
        raise NodeCollision(f"{deficit} nodes collapse at the origin")
    x = np.concatenate([x, np.zeros(deficit)])
    if symmetrize and _is_real_input(m):
        x = symmetrize_conjugates(x, cluster_tol)
    if len(cluster_roots(x, cluster_tol)) < N or _min_gap(x) <= node_gap:
        raise NodeCollision("recovered nodes cluster; try solve_confluent_prony")
    x = x[canonical_order(x)]
    V = x[None, :] ** np.arange(2 * N)[:, None]
    a = np.linalg.lstsq(V, m, rcond=None)[0]
    if refine:
        x, amps = refine_confluent(x, [1] * N, [np.array([v]) for v in a], m)
        a = np.concatenate(amps)
        if symmetrize and _is_real_input(m):
            x, amps = _realify(x, np.split(a, N))
            a = np.concatenate(amps)
    if np.min(np.abs(a)) <= amplitude_floor:
        raise AmplitudeBelowFloor(
            f"recovered amplitude {np.min(np.abs(a)):.3e} below floor; N overestimated?")
    return PronySolution(x, a, node_gap=node_gap, amplitude_floor=amplitude_floor)


def solve_confluent_prony(m, multiplicities, *, amplitude_floor: float = AMPLITUDE_FLOOR,
                          node_gap: float = NODE_GAP, cluster_tol: float = CLUSTER_TOL,
                          rank_tol: float = CONFLUENT_RANK_TOL,
                          symmetrize: bool = True, refine: bool = True) -> ConfluentPronySolution:
    """Solve the confluent Prony system from the first ``2L`` moments,
    ``L = sum(multiplicities)``.

    ``multiplicities`` lists ``l_j`` in canonical node order. The Pade
    denominator of degree ``L`` has a root of order ``l_j`` at ``1/x_j``; its
    reciprocal roots are grouped into as many clusters as there are nodes and
    each node is the cluster mean. All ``a_{i,j}`` then come from a
    least-squares fit against the confluent Vandermonde matrix.
    """
    pattern = tuple(int(l) for l in multiplicities)
    if not pattern or min(pattern) < 1:
        raise ValueError("multiplicities must be positive")
    L = sum(pattern)
    m = np.asarray(m)
    if m.size < 2 * L:
        raise ValueError(f"need {2 * L} moments, got {m.size}")
    m = m[: 2 * L].astype(complex)
    x, deficit = _denominator_nodes(m, L, rank_tol)
    nclusters = len(pattern) - (1 if deficit else 0)
    if nclusters < 0 or (nclusters == 0 and x.size) or (x.size and nclusters > x.size):
        raise MultiplicityMismatch(
            f"denominator structure incompatible with pattern {pattern}")
    nodes, mults = [], []
    if x.size:
        groups = cluster_into(x, nclusters)
        centres = np.array([x[g].mean() for g in groups])
        for q, (g, c) in enumerate(zip(groups, centres)):
            diam = np.max(np.abs(x[g] - c)) if g.size > 1 else 0.0
            others = np.abs(np.delete(centres, q) - c)
            if others.size and diam >= 0.5 * others.min():
                raise MultiplicityMismatch("denominator roots do not form separated clusters")
            nodes.append(c)
            mults.append(g.size)
    if deficit:
        nodes.append(0.0)
        mults.append(deficit)
    nodes = np.array(nodes, dtype=complex)
    if symmetrize and _is_real_input(m):
        nodes = symmetrize_conjugates(nodes, cluster_tol)
    if _min_gap(nodes) <= node_gap:
        raise NodeCollision("recovered nodes coincide")
    p = canonical_order(nodes)
    nodes = nodes[p]
    mults = [mults[i] for i in p]
    if tuple(mults) != pattern:
        raise MultiplicityMismatch(
            f"recovered multiplicities {tuple(mults)} differ from requested {pattern}")
    V = confluent_vandermonde(nodes, [l - 1 for l in mults], 2 * L, tol=0.0)
    flat = np.linalg.lstsq(V, m, rcond=None)[0]
    amps = np.split(flat, np.cumsum(mults)[:-1])
    if refine:
        nodes, amps = refine_confluent(nodes, mults, amps, m)
        if symmetrize and _is_real_input(m):
            nodes, amps = _realify(nodes, amps)
    if any(abs(a[-1]) <= amplitude_floor for a in amps):
        raise AmplitudeBelowFloor("a highest-order amplitude is below the floor")
    return ConfluentPronySolution(nodes, tuple(amps), node_gap=node_gap,
                                  amplitude_floor=amplitude_floor)
