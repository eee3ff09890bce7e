"""Acceptance gate: one PASS/FAIL line per criterion at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
without ``-s``) or directly as ``python3 tests/test_acceptance.py``.
"""
import time
import warnings
from pathlib import Path

import numpy as np
import pytest
import yaml
from scipy.integrate import IntegrationWarning, quad

from prony_lab.cli import main
from prony_lab.errors import AmbiguousAmplitudes
from prony_lab.multidim import MDPronySolution, axis_moments, solve_prony_md
from prony_lab.piecewise import PiecewiseConstantSignal, l2_distance, l2_norm, \
    reconstruct_piecewise_constant
from prony_lab.polyalg import confluent_vandermonde, gautschi_bound, inf_norm_inverse
from prony_lab.prony import (ConfluentPronySolution, PronySolution, confluent_moments,
                             prony_moments, solve_confluent_prony, solve_prony_1d)
from prony_lab.shifts import (FourierMeasurements, KernelMoments, dual_coefficients,
                              recover_shifts_from_fourier, recover_shifts_from_moments,
                              shifts_from_nodes)
from prony_lab.stability import amplitude_sweep, noise_experiment, prony_jacobian, unit_noise

from conftest import match_error, random_amplitudes, separated_points

START = time.perf_counter()
CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SEED = 20240601


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        assert ok, detail
    return emit


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# ---------------------------------------------------------------- 1

def test_c1_prony_roundtrip(report):
    def run():
        rng = np.random.default_rng(SEED)
        ex, ea = 0.0, 0.0
        for _ in range(200):
            n = int(rng.integers(1, 7))
            truth = PronySolution(separated_points(rng, n), random_amplitudes(rng, n))
            est = solve_prony_1d(prony_moments(truth, 2 * n).real, n)
            ex = max(ex, np.max(np.abs(est.nodes - truth.nodes)))
            ea = max(ea, np.max(np.abs(est.amplitudes - truth.amplitudes)))
        return ex, ea
    (ex, ea), dt = timed(run)
    report("1 classical roundtrip (200 instances)", ex <= 1e-8 and ea <= 1e-7 and dt < 5,
           f"node err {ex:.2e} <= 1e-8, amplitude err {ea:.2e} <= 1e-7, {dt:.2f} s < 5 s")


# ---------------------------------------------------------------- 2

def random_confluent(rng):
    n = int(rng.integers(1, 4))
    mult = rng.integers(1, 4, n)
    while mult.sum() > 6:
        mult[np.argmax(mult)] -= 1
    amps = []
    for l in mult:
        a = rng.uniform(-2, 2, l)
        a[-1] = rng.choice([-1, 1]) * rng.uniform(0.5, 2)
        amps.append(a)
    return ConfluentPronySolution(separated_points(rng, n, gap=0.2), tuple(amps))


def test_c2_confluent_roundtrip(report):
    rng = np.random.default_rng(SEED + 2)
    ex = 0.0
    for _ in range(100):
        truth = random_confluent(rng)
        m = confluent_moments(truth, 2 * sum(truth.multiplicities)).real
        est = solve_confluent_prony(m, truth.multiplicities)
        ex = max(ex, np.max(np.abs(est.nodes - truth.nodes)))
    dg = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        truth = PronySolution(separated_points(rng, n), random_amplitudes(rng, n))
        m = prony_moments(truth, 2 * n).real
        c, p = solve_confluent_prony(m, (1,) * n), solve_prony_1d(m, n)
        dg = max(dg, np.max(np.abs(c.nodes - p.nodes)),
                 np.max(np.abs(c.flat_amplitudes - p.amplitudes)))
    report("2 confluent roundtrip (100 instances) + degeneracy", ex <= 1e-7 and dg <= 1e-10,
           f"node err {ex:.2e} <= 1e-7, all-simple vs classical {dg:.2e} <= 1e-10")


# ---------------------------------------------------------------- 3

def test_c3_multidim(report):
    rng = np.random.default_rng(SEED + 3)
    ex = 0.0
    for _ in range(100):
        d, n = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        pts = np.column_stack([rng.permutation(separated_points(rng, n)) for _ in range(d)])
        a = np.linspace(0.5, 2.0, n) * rng.choice([-1, 1], n) if n > 1 else np.array([1.3])
        truth = MDPronySolution(pts, a)
        est = solve_prony_md(axis_moments(truth, 2 * n), n)
        ex = max(ex, np.max(np.abs(est.points - truth.points)),
                 np.max(np.abs(est.amplitudes - truth.amplitudes)))
    x1, x2 = 0.3, 0.7
    swapped = MDPronySolution([[x1, x2], [x2, x1]], [1.0, 1.0])
    diagonal = MDPronySolution([[x1, x1], [x2, x2]], [1.0, 1.0])
    equal = np.array_equal(axis_moments(swapped, 4).values, axis_moments(diagonal, 4).values)
    try:
        solve_prony_md(axis_moments(swapped, 4), 2)
        raised = False
    except AmbiguousAmplitudes:
        raised = True
    report("3 multi-d separation (100 instances) + counterexample",
           ex <= 1e-7 and equal and raised,
           f"err {ex:.2e} <= 1e-7, swapped == diagonal axis moments: {equal}, "
           f"AmbiguousAmplitudes raised: {raised}")


# ---------------------------------------------------------------- 4

def _quad(f, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(f, a, b, points=points, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def test_c4_shift_reconstruction(report):
    def run():
        mu = 1 / np.arange(1, 9)
        C = dual_coefficients(KernelMoments(mu), 6)
        dual_err = 0.0
        for x in np.linspace(-2, 2, 20):
            for k in range(7):
                psi = np.polynomial.Polynomial(C.polynomial(k))
                dual_err = max(dual_err, abs(_quad(psi, x, x + 1) - x ** k))
        rng = np.random.default_rng(SEED + 4)
        mom_err = four_err = 0.0
        sigma = 0.3
        for trial in range(10):
            n = 1 + trial % 2
            shifts = separated_points(rng, n, -1.0, 1.0, gap=0.4)
            amps = random_amplitudes(rng, n)
            # moment case, box kernel: oracle moments by quadrature of F
            F = lambda t: sum(a * ((t >= s) & (t < s + 1)) for s, a in zip(shifts, amps))
            brk = sorted(set(shifts) | set(shifts + 1))
            m = np.array([_quad(lambda t: t ** k * F(t), brk[0], brk[-1], points=brk)
                          for k in range(2 * n)])
            est = recover_shifts_from_moments(KernelMoments(mu), m, n)
            mom_err = max(mom_err, match_error(shifts, est.nodes.real),
                          np.max(np.abs(np.sort(est.amplitudes.real) - np.sort(amps))))
            # Fourier case, periodised Gaussian with analytic transform
            shifts = separated_points(rng, n, -2.5, 2.5, gap=0.8)
            g = lambda t: sum(np.exp(-0.5 * ((t - s + 2 * np.pi * j) / sigma) ** 2) * a
                              for s, a in zip(shifts, amps) for j in range(-3, 4))
            c = np.array([_quad(lambda t: g(t) * np.cos(k * t), -np.pi, np.pi)
                          + 1j * _quad(lambda t: g(t) * np.sin(k * t), -np.pi, np.pi)
                          for k in range(2 * n)])
            fhat = sigma * np.sqrt(2 * np.pi) * np.exp(-0.5 * (sigma * np.arange(2 * n)) ** 2)
            est = recover_shifts_from_fourier(FourierMeasurements(c, fhat), n)
            four_err = max(four_err, match_error(shifts, shifts_from_nodes(est)),
                           np.max(np.abs(np.sort(est.amplitudes.real) - np.sort(amps))))
        return dual_err, mom_err, four_err
    (dual_err, mom_err, four_err), dt = timed(run)
    ok = dual_err <= 1e-6 and mom_err <= 1e-6 and four_err <= 1e-6 and dt < 10
    report("4 shift reconstruction", ok,
           f"dual property err {dual_err:.2e}, moment case {mom_err:.2e}, "
           f"Fourier case {four_err:.2e} (all <= 1e-6), {dt:.2f} s < 10 s")


# ---------------------------------------------------------------- 5

def random_box(rng):
    xi = np.array([rng.uniform(0.15, 0.35), rng.uniform(0.65, 0.85)])
    h = rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)
    return PiecewiseConstantSignal.from_pieces(xi, [h])


def test_c5_piecewise_constant(report):
    rng = np.random.default_rng(SEED + 5)
    jump_err = sum_res = piece_err = l2_err = 0.0
    for t in range(100):
        truth = random_box(rng)
        m = truth.moments(5)
        est = reconstruct_piecewise_constant(m, 2)
        jump_err = max(jump_err, np.max(np.abs(est.jumps - truth.jumps)))
        sum_res = max(sum_res, abs(est.diagnostics["jump_sum"]))
        eps = 1e-3 * np.max(np.abs(m))
        noisy = reconstruct_piecewise_constant(m + eps * unit_noise(SEED, t, 5), 2)
        piece_err = max(piece_err, np.linalg.norm(noisy.values - truth.values)
                        / np.linalg.norm(truth.values))
        l2_err = max(l2_err, l2_distance(noisy, truth) / l2_norm(truth))
    # four-jump signals, noiseless
    for _ in range(50):
        xi = separated_points(rng, 4, 0.0, 1.0, gap=0.15)
        v = random_amplitudes(rng, 3)
        if np.min(np.abs(np.diff(np.concatenate([[0], v, [0]])))) < 0.3:
            continue
        truth = PiecewiseConstantSignal.from_pieces(xi, v)
        est = reconstruct_piecewise_constant(truth.moments(9), 4)
        jump_err = max(jump_err, np.max(np.abs(est.jumps - truth.jumps)))
        sum_res = max(sum_res, abs(est.diagnostics["jump_sum"]))
    ok = jump_err <= 1e-7 and sum_res <= 1e-8 and piece_err <= 0.05
    report("5 piecewise-constant reconstruction", ok,
           f"noiseless jump err {jump_err:.2e} <= 1e-7, jump-sum residual {sum_res:.2e} "
           f"<= 1e-8, noisy piece-value err {100 * piece_err:.2f}% <= 5% "
           f"(function L2 err {100 * l2_err:.1f}%, informational)")


# ---------------------------------------------------------------- 6

def fd_jacobian(sol, h=1e-6):
    K = 2 * sol.size
    cols = []
    for j in range(sol.size):
        for which in ("a", "x"):
            d = np.zeros(sol.size)
            d[j] = h
            x_up, x_dn = (sol.nodes + d, sol.nodes - d) if which == "x" else (sol.nodes,) * 2
            a_up, a_dn = (sol.amplitudes + d, sol.amplitudes - d) if which == "a" \
                else (sol.amplitudes,) * 2
            V = lambda x: x[None, :] ** np.arange(K)[:, None]
            cols.append((V(x_up) @ a_up - V(x_dn) @ a_dn) / (2 * h))
    return np.column_stack(cols)


def test_c6_stability(report):
    rng = np.random.default_rng(SEED + 6)
    gautschi_ok = True
    for _ in range(100):
        n = int(rng.integers(1, 7))
        x = separated_points(rng, n, gap=0.1)
        V = confluent_vandermonde(x, [1] * n, 2 * n)
        gautschi_ok &= gautschi_bound(x) >= inf_norm_inverse(V)
    jac_err = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        sol = PronySolution(separated_points(rng, n), random_amplitudes(rng, n))
        J, fd = prony_jacobian(sol), fd_jacobian(sol)
        jac_err = max(jac_err, np.max(np.abs(J - fd)) / np.max(np.abs(fd)))
    models = [PronySolution([0.3, 0.7], [1.0, -1.0]),
              PronySolution([-0.5, 0.1, 0.6], [1.0, 2.0, -0.7])]
    slopes, contain = [], []
    for sol in models:
        rep = noise_experiment(sol, np.logspace(-9, -6, 7), 100, SEED)
        slopes += list(rep.slopes.values())
        contain.append(rep.containment)
    slope_dev = max(abs(s - 1) for s in slopes)
    ok = gautschi_ok and jac_err <= 1e-6 and slope_dev <= 0.1 and min(contain) >= 0.99
    report("6 stability theory", ok,
           f"Gautschi >= exact on 100 sets: {bool(gautschi_ok)}, Jacobian vs FD "
           f"{jac_err:.2e} <= 1e-6, slopes 1 +- {slope_dev:.4f} (<= 0.1), "
           f"containment {min(contain):.3f} >= 0.99")


# ---------------------------------------------------------------- 7

def test_c7_amplitude_sweep(report):
    sol = PronySolution([0.2, 0.5, 0.8], [1.0, -1.5, 0.8])
    sw = amplitude_sweep(sol, 0, np.logspace(0, 3, 7), 1e-7, 30, SEED)
    ok = abs(sw.slope + 1) <= 0.15 and sw.other_ratio < 3
    report("7 node error vs amplitude magnitude", ok,
           f"slope {sw.slope:.4f} in -1 +- 0.15, other nodes vary x{sw.other_ratio:.3f} < 3")


# ---------------------------------------------------------------- 8

def test_c8_determinism_and_runtime(report, tmp_path):
    identical = True
    for path in sorted(CONFIGS.glob("*.yaml")):
        task = yaml.safe_load(path.read_text())["task"]
        outputs = []
        for run, flags in enumerate(([], ["--serial"])):
            out = tmp_path / f"{path.stem}-{run}"
            assert main([task, "--config", str(path), "--out", str(out), *flags]) == 0
            outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        identical &= outputs[0] == outputs[1]
    elapsed = time.perf_counter() - START
    report("8 determinism + suite runtime", identical and elapsed < 120,
           f"all shipped configs byte-identical across reruns (threaded vs serial): "
           f"{bool(identical)}, acceptance suite {elapsed:.1f} s < 120 s")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
