"""Local sensitivity of Prony inversion.

The Jacobian of the Prony map ``(a_j, x_j) -> (m_0..m_{2N-1})`` factors as
``V @ blockdiag([[1, 0], [0, a_j]])`` with ``V`` the confluent Vandermonde
matrix having one derivative column per node. Inverting gives the first-order
bounds ``|dx_j| <= C eps / |a_j|`` and ``|da_j| <= C eps`` with
``C = ||V^{-1}||_inf``. The confluent system has the analogous bounds with
``V`` carrying ``l_j`` derivative columns per node.

Noise experiments draw uniform perturbations in ``[-eps, eps]`` from a
Philox generator keyed by ``(seed, trial)``; draw ``k`` perturbs moment ``k``.
The same unit draws are reused for every ``eps`` so error curves are smooth in
``eps``, and results do not depend on the order in which trials run.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import PronyError, SolveFailed
from .polyalg import confluent_vandermonde, gautschi_bound, inf_norm_inverse
from .prony import (ConfluentPronySolution, PronySolution, confluent_moments,
                    prony_moments, solve_confluent_prony, solve_prony_1d)


@dataclass
class StabilityReport:
    """Predicted bounds and, for experiments, measured errors.

    ``records`` holds one dict per (eps, trial, parameter) with keys
    ``eps, trial, param, error, bound``; failed trials carry ``nan`` errors.
    """

    constant: float
    gautschi: float | None = None
    node_bounds: np.ndarray = field(default_factory=lambda: np.zeros(0))
    amplitude_bounds: list = field(default_factory=list)
    records: list = field(default_factory=list)
    max_errors: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)
    violations: int = 0
    trials_checked: int = 0
    failures: int = 0
    seed: int | None = None

    @property
    def containment(self) -> float:
        """Fraction of (eps, trial) pairs with every error within the slack bound."""
        if not self.trials_checked:
            return 1.0
        return 1.0 - self.violations / self.trials_checked


def prony_jacobian(sol: PronySolution, factors: bool = False):
    """Jacobian of the Prony map at ``sol`` over ``2N`` moments.

    Columns are ordered ``(a_1, x_1, a_2, x_2, ...)``. With ``factors=True``
    returns ``(J, V, D)`` where ``J = V @ D``.
    """
    N = sol.size
    V = confluent_vandermonde(sol.nodes, [1] * N, 2 * N)
    D = scipy.linalg.block_diag(*[np.diag([1.0, a]) for a in sol.amplitudes])
    J = V @ D
    return (J, V, D) if factors else J


def local_error_bounds(sol: PronySolution, eps: float) -> StabilityReport:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    V = confluent_vandermonde(sol.nodes, [1] * sol.size, 2 * sol.size)
    C1 = inf_norm_inverse(V)
    return StabilityReport(
        constant=C1,
        gautschi=gautschi_bound(sol.nodes),
        node_bounds=C1 * eps / np.abs(sol.amplitudes),
        amplitude_bounds=[np.array([C1 * eps]) for _ in range(sol.size)],
    )


def confluent_error_bounds(sol: ConfluentPronySolution, eps: float) -> StabilityReport:
    """Bounds for the confluent system over ``P = sum(l_j) + n`` moments."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    mult = sol.multiplicities
    P = sum(mult) + len(mult)
    V = confluent_vandermonde(sol.nodes, mult, P)
    C2 = inf_norm_inverse(V)
    node_bounds, amp_bounds = [], []
    for a in sol.amplitudes:
        top = abs(a[-1])
        b = np.empty(a.size)
        b[0] = C2 * eps
        b[1:] = C2 * eps * (1 + np.abs(a[:-1]) / top)
        amp_bounds.append(b)
        node_bounds.append(C2 * eps / top)
    gautschi = gautschi_bound(sol.nodes) if all(l == 1 for l in mult) else None
    return StabilityReport(constant=C2, gautschi=gautschi,
                           node_bounds=np.array(node_bounds), amplitude_bounds=amp_bounds)


def unit_noise(seed: int, trial: int, K: int, complex_valued: bool = False,
               kind: str = "uniform") -> np.ndarray:
    """Unit-scale perturbation for ``(seed, trial)``; entry ``k`` is moment ``k``."""
    key = np.random.SeedSequence([seed, trial]).generate_state(2, np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    if kind == "uniform":
        draw = rng.uniform(-1.0, 1.0, size=(2 if complex_valued else 1, K))
    elif kind == "gaussian":
        draw = rng.standard_normal(size=(2 if complex_valued else 1, K))
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    if complex_valued:
        return (draw[0] + 1j * draw[1]) / np.sqrt(2)
    return draw[0]


def _as_confluent(sol):
    if isinstance(sol, PronySolution):
        return ConfluentPronySolution.from_classical(sol), True
    return sol, False


def parameter_errors(truth: ConfluentPronySolution, est: ConfluentPronySolution):
    """Per-parameter absolute errors after matching estimated nodes to true ones."""
    cost = np.abs(truth.nodes[:, None] - est.nodes[None, :])
    rows, cols = linear_sum_assignment(cost)
    out = {}
    for j, q in zip(rows, cols):
        out[f"x[{j}]"] = abs(est.nodes[q] - truth.nodes[j])
        at, ae = truth.amplitudes[j], est.amplitudes[q]
        if at.size != ae.size:
            raise SolveFailed("multiplicity changed")
        for i in range(at.size):
            out[f"a[{i},{j}]"] = abs(ae[i] - at[i])
    return out


def _bound_table(sol: ConfluentPronySolution, eps: float, classical: bool):
    rep = (local_error_bounds(PronySolution(sol.nodes, sol.flat_amplitudes), eps)
           if classical else confluent_error_bounds(sol, eps))
    out = {}
    for j in range(sol.nodes.size):
        out[f"x[{j}]"] = float(rep.node_bounds[j])
        for i, b in enumerate(rep.amplitude_bounds[j]):
            out[f"a[{i},{j}]"] = float(b)
    return rep.constant, rep.gautschi, out


def _fit_slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log10(x[ok]), np.log10(y[ok]), 1)[0])


def noise_experiment(sol, eps_grid, trials: int, seed: int, *, slack: float = 2.0,
                     noise: str = "uniform", serial: bool = False,
                     max_workers: int | None = None, **solver_options) -> StabilityReport:
    """Perturb exact moments, re-solve, and compare errors with the bounds.

    Classical solutions use ``2N`` moments. Confluent solutions use the ``2L``
    moments the solver consumes and are compared with the confluent bounds.
    Trials whose solve fails are recorded with ``nan`` errors; more than half
    failing raises :class:`SolveFailed`. Containment against ``slack`` times
    the bounds is only counted for ``eps > 0``.
    """
    conf, classical = _as_confluent(sol)
    K = 2 * conf.nodes.size if classical else 2 * sum(conf.multiplicities)
    exact = prony_moments(sol, K) if classical else confluent_moments(conf, K)
    is_complex = bool(np.any(exact.imag != 0) or np.any(conf.nodes.imag != 0))
    if not is_complex:
        exact = exact.real
    eps_grid = [float(e) for e in eps_grid]
    if any(e < 0 for e in eps_grid):
        raise ValueError("noise levels must be nonnegative")

    constant, gautschi, _ = _bound_table(conf, 1.0, classical)

    def run_trial(t):
        u = unit_noise(seed, t, K, is_complex, noise)
        rows, failed, violated = [], 0, 0
        for e in eps_grid:
            _, _, bounds = _bound_table(conf, e, classical)
            try:
                m = exact + e * u
                if classical:
                    est = ConfluentPronySolution.from_classical(
                        solve_prony_1d(m, conf.nodes.size, **solver_options))
                else:
                    est = solve_confluent_prony(m, conf.multiplicities, **solver_options)
                errs = parameter_errors(conf, est)
            except PronyError:
                errs = {p: float("nan") for p in bounds}
                failed += 1
            if e > 0:
                violated += int(any(not (errs[p] <= slack * bounds[p]) for p in bounds))
            for p in bounds:
                rows.append({"eps": e, "trial": t, "param": p,
                             "error": float(errs[p]), "bound": bounds[p]})
        return rows, failed, violated

    if serial or trials <= 1:
        results = [run_trial(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run_trial, range(trials)))

    records = [r for rows, _, _ in results for r in rows]
    failures = sum(f for _, f, _ in results)
    total = trials * len(eps_grid)
    checked = trials * sum(1 for e in eps_grid if e > 0)
    if total and failures > total / 2:
        raise SolveFailed(f"{failures} of {total} solves failed")

    params = list(dict.fromkeys(r["param"] for r in records))
    max_errors, slopes = {}, {}
    for p in params:
        per_eps = []
        for e in eps_grid:
            errs = [r["error"] for r in records if r["param"] == p and r["eps"] == e]
            errs = [v for v in errs if np.isfinite(v)]
            per_eps.append(max(errs) if errs else float("nan"))
        max_errors[p] = per_eps
        slopes[p] = _fit_slope(eps_grid, per_eps)

    _, _, unit_bounds = _bound_table(conf, 1.0, classical)
    return StabilityReport(
        constant=constant, gautschi=gautschi,
        node_bounds=np.array([unit_bounds[f"x[{j}]"] for j in range(conf.nodes.size)]),
        amplitude_bounds=[np.array([unit_bounds[f"a[{i},{j}]"] for i in range(l)])
                          for j, l in enumerate(conf.multiplicities)],
        records=records, max_errors=max_errors, slopes=slopes,
        violations=sum(v for _, _, v in results), trials_checked=checked,
        failures=failures, seed=seed)


@dataclass
class AmplitudeSweep:
    """Node errors while one amplitude is scaled (error-vs-jump-magnitude)."""

    index: int
    magnitudes: np.ndarray
    node_errors: np.ndarray          # (len(magnitudes), n_nodes), max over trials
    slope: float                     # log-log slope of node ``index`` error vs magnitude
    other_ratio: float               # max/min error ratio of the other nodes
    records: list = field(default_factory=list)
    seed: int | None = None


def amplitude_sweep(sol: PronySolution, index: int, scales, eps: float, trials: int,
                    seed: int, *, serial: bool = False, **solver_options) -> AmplitudeSweep:
    """Scale amplitude ``index`` (canonical order) by each factor in ``scales``
    and record the worst node errors over ``trials`` noise draws at ``eps``."""
    scales = np.asarray(scales, dtype=float)
    rows, errs, mags = [], [], []
    for s in scales:
        a = sol.amplitudes.copy()
        a[index] = a[index] * s
        cur = PronySolution(sol.nodes, a)
        rep = noise_experiment(cur, [eps], trials, seed, serial=serial, **solver_options)
        per_node = [rep.max_errors[f"x[{j}]"][0] for j in range(cur.size)]
        errs.append(per_node)
        mags.append(abs(a[index]))
        for r in rep.records:
            if r["param"].startswith("x["):
                rows.append({"magnitude": abs(a[index]), **r})
    errs = np.array(errs)
    slope = _fit_slope(mags, errs[:, index])
    others = np.delete(errs, index, axis=1)
    ratio = float(np.max(others.max(axis=0) / others.min(axis=0))) if others.size else 1.0
    return AmplitudeSweep(index, np.array(mags), errs, slope, ratio, rows, seed)
