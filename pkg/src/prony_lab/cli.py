"""``prony-lab <task> --config FILE [--seed S] [--out DIR] [--serial]``

Every task writes ``result.json`` (validated against
``schemas/result-v1.json``) and ``table.csv`` into the output directory.
Exit status is 0 on success, 1 for an invalid config (error object on stderr)
and 2 when a solver fails (error object in ``result.json``).

Synthetic measurements come from a ``model`` section; ``solve-prony`` and
``solve-confluent`` also accept ``moments_file``, a JSON object
``{"values": [...], "noise_eps": eps}`` whose complex entries are
``[re, im]`` pairs.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import __version__
from .config import TASKS, ExperimentConfig, load_config
from .errors import ConfigInvalid, PronyError
from .multidim import AxisMoments, MDPronySolution, axis_moments, solve_prony_md
from .piecewise import (PiecewiseConstantSignal, l2_distance, l2_norm,
                        reconstruct_piecewise_constant)
from .prony import (ConfluentPronySolution, PronySolution, confluent_moments,
                    prony_moments, solve_confluent_prony, solve_prony_1d)
from .quadrature import (BoxShiftsIntegrand, GaussianShiftsIntegrand,
                         QuadratureSpec, compute_moments)
from .shifts import (FourierMeasurements, KernelMoments,
                     recover_shifts_from_fourier, recover_shifts_from_moments,
                     shifts_from_nodes)
from .stability import (amplitude_sweep, confluent_error_bounds, local_error_bounds,
                        noise_experiment, parameter_errors, unit_noise)

SCHEMA_VERSION = 1
SOLVER_KEYS = {"amplitude_floor", "node_gap", "cluster_tol", "rank_tol",
               "symmetrize", "refine"}


# ---------------------------------------------------------------- encoding

def encode(x):
    """JSON-ready copy of ``x``: complex as ``[re, im]``, nan/inf as null.

    Arrays whose imaginary parts all vanish are written as plain numbers.
    """
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x) and np.all(x.imag == 0):
            x = x.real
        return [encode(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        if x.imag == 0:
            return encode(float(x.real))
        return [encode(float(x.real)), encode(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    return str(v)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[h]) for h in header])


def write_json(path: Path, obj):
    path.write_text(json.dumps(encode(obj), indent=2, allow_nan=False) + "\n")


def parse_values(values) -> np.ndarray:
    """Numbers or ``[re, im]`` pairs -> real or complex array."""
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ConfigInvalid("complex entries must be [re, im] pairs")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(float(v)))
    arr = np.array(out, dtype=complex)
    return arr.real if np.all(arr.imag == 0) else arr


# ---------------------------------------------------------------- helpers

def _solver_options(cfg: ExperimentConfig) -> dict:
    opts = dict(cfg.params.get("solver", {}) or {})
    unknown = set(opts) - SOLVER_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown solver options {sorted(unknown)}")
    return opts


def _model(build, *args):
    try:
        return build(*args)
    except (ValueError, TypeError, KeyError, PronyError) as exc:
        raise ConfigInvalid(f"invalid model: {exc}") from exc


def _noisy(m, eps: float, seed, trial: int):
    if eps == 0:
        return m
    u = unit_noise(seed, trial, m.size, np.iscomplexobj(m))
    return m + eps * u


def _run_trials(cfg, solve_one):
    """Call ``solve_one(trial)`` for every trial; solver errors become
    failure records. More than half failing (or the only trial) re-raises."""
    results, failures, last = [], [], None
    for t in range(cfg.trials):
        try:
            results.append((t, solve_one(t)))
        except PronyError as exc:
            failures.append({"trial": t, "type": type(exc).__name__, "message": str(exc)})
            last = exc
    if not results or len(failures) > cfg.trials / 2:
        raise last
    return results, failures


def _param_rows(trial, truth: ConfluentPronySolution | None, est: ConfluentPronySolution):
    errs = parameter_errors(truth, est) if truth is not None else {}
    rows = []
    for j, x in enumerate(est.nodes):
        rows.append(("x", j, None, x))
        for i, a in enumerate(est.amplitudes[j]):
            rows.append(("a", j, i, a))
    out = []
    for kind, j, i, v in rows:
        name = f"x[{j}]" if kind == "x" else f"a[{i},{j}]"
        out.append({"trial": trial, "param": name, "estimate_re": float(np.real(v)),
                    "estimate_im": float(np.imag(v)),
                    "error": float(errs.get(name, float("nan")))})
    return out


PARAM_HEADER = ["trial", "param", "estimate_re", "estimate_im", "error"]


def _confluent_solution_json(sol: ConfluentPronySolution):
    return {"nodes": sol.nodes, "multiplicities": list(sol.multiplicities),
            "amplitudes": [a for a in sol.amplitudes]}


def _bounds_json(rep):
    return {"constant": rep.constant, "gautschi": rep.gautschi,
            "node_bounds": rep.node_bounds,
            "amplitude_bounds": [np.asarray(b) for b in rep.amplitude_bounds]}


def _moments_from_file(cfg):
    path = Path(cfg.params["moments_file"])
    try:
        data = json.loads(path.read_text())
        values = parse_values(data["values"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigInvalid(f"cannot read moments file {path}: {exc}") from exc
    eps = float(data.get("noise_eps", 0.0) or 0.0)
    if eps < 0:
        raise ConfigInvalid("noise_eps must be nonnegative")
    return values, eps


# ---------------------------------------------------------------- tasks

def task_solve_prony(cfg):
    p, opts = cfg.params, _solver_options(cfg)
    truth = None
    if "model" in p:
        truth = _model(lambda m: PronySolution(parse_values(m["nodes"]),
                                                   parse_values(m["amplitudes"])), p["model"])
        N = p.get("N", truth.size)
        K = p.get("moments", 2 * N)
        exact = prony_moments(truth, K)
        if truth.is_real():
            exact = exact.real
        eps = float(p.get("noise_eps", 0.0))
    else:
        exact, eps = _moments_from_file(cfg)
        if "N" not in p:
            raise ConfigInvalid("N is required with a moments file")
        N, K = p["N"], exact.size
        eps = float(p.get("noise_eps", eps))
    if N < 1 or K < 2 * N:
        raise ConfigInvalid(f"need N >= 1 and at least 2N = {2 * N} moments")
    conf_truth = ConfluentPronySolution.from_classical(truth) if truth else None

    def solve(t):
        m = _noisy(exact, eps, cfg.seed, t) if truth else exact
        return m, solve_prony_1d(m, N, **opts)

    results, failures = _run_trials(cfg, solve)
    rows = []
    for t, (_, est) in results:
        rows += _param_rows(t, conf_truth, ConfluentPronySolution.from_classical(est))
    m0, est0 = results[0][1]
    fitted = prony_moments(est0, m0.size)
    return {
        "solution": {"nodes": est0.nodes, "amplitudes": est0.amplitudes},
        "residuals": {"max_moment_residual": float(np.max(np.abs(fitted - m0)))},
        "bounds": _bounds_json(local_error_bounds(est0, eps)),
        "diagnostics": {"noise_eps": eps, "moments": int(m0.size), "failures": failures,
                        "truth": ({"nodes": truth.nodes, "amplitudes": truth.amplitudes}
                                  if truth else None)},
    }, PARAM_HEADER, rows


def task_solve_confluent(cfg):
    p, opts = cfg.params, _solver_options(cfg)
    truth = None
    if "model" in p:
        truth = _model(lambda m: ConfluentPronySolution(
            parse_values(m["nodes"]), tuple(parse_values(np.atleast_1d(a).tolist())
                                            for a in m["amplitudes"])), p["model"])
        mult = truth.multiplicities
        K = p.get("moments", 2 * sum(mult))
        exact = confluent_moments(truth, K)
        if np.all(exact.imag == 0) and np.all(truth.nodes.imag == 0):
            exact = exact.real
        eps = float(p.get("noise_eps", 0.0))
    else:
        exact, eps = _moments_from_file(cfg)
        if "multiplicities" not in p:
            raise ConfigInvalid("multiplicities are required with a moments file")
        mult = tuple(int(l) for l in p["multiplicities"])
        eps = float(p.get("noise_eps", eps))
    if not mult or min(mult) < 1:
        raise ConfigInvalid("multiplicities must be positive")
    if exact.size < 2 * sum(mult):
        raise ConfigInvalid(f"need at least {2 * sum(mult)} moments")

    def solve(t):
        m = _noisy(exact, eps, cfg.seed, t) if truth else exact
        return m, solve_confluent_prony(m, mult, **opts)

    results, failures = _run_trials(cfg, solve)
    rows = []
    for t, (_, est) in results:
        rows += _param_rows(t, truth, est)
    m0, est0 = results[0][1]
    fitted = confluent_moments(est0, m0.size)
    return {
        "solution": _confluent_solution_json(est0),
        "residuals": {"max_moment_residual": float(np.max(np.abs(fitted - m0)))},
        "bounds": _bounds_json(confluent_error_bounds(est0, eps)),
        "diagnostics": {"noise_eps": eps, "moments": int(m0.size), "failures": failures,
                        "truth": _confluent_solution_json(truth) if truth else None},
    }, PARAM_HEADER, rows


def task_solve_md(cfg):
    p, opts = cfg.params, _solver_options(cfg)
    truth = _model(lambda m: MDPronySolution(np.array(m["points"], dtype=float),
                                             parse_values(m["amplitudes"])), p["model"])
    N = p.get("N", truth.amplitudes.size)
    K = p.get("moments", 2 * N)
    exact = axis_moments(truth, K).values
    if np.all(exact.imag == 0):
        exact = exact.real
    eps = float(p.get("noise_eps", 0.0))

    def solve(t):
        m = exact
        if eps:
            u = unit_noise(cfg.seed, t, exact.size, np.iscomplexobj(exact))
            m = exact + eps * u.reshape(exact.shape)
        return m, solve_prony_md(AxisMoments(m), N, **opts)

    results, failures = _run_trials(cfg, solve)
    rows = []
    for t, (_, est) in results:
        cost = np.linalg.norm(truth.points[:, None, :] - est.points[None, :, :], axis=2)
        ri, ci = linear_sum_assignment(cost)
        for j, q in zip(ri, ci):
            for l in range(est.dimension):
                v = est.points[q, l]
                rows.append({"trial": t, "param": f"x[{j},{l}]", "estimate_re": v.real,
                             "estimate_im": v.imag,
                             "error": float(abs(v - truth.points[j, l]))})
            v = est.amplitudes[q]
            rows.append({"trial": t, "param": f"a[{j}]", "estimate_re": v.real,
                         "estimate_im": v.imag,
                         "error": float(abs(v - truth.amplitudes[j]))})
    est0 = results[0][1][1]
    return {
        "solution": {"points": [r for r in est0.points], "amplitudes": est0.amplitudes},
        "residuals": {},
        "bounds": {},
        "diagnostics": {"noise_eps": eps, "moments_per_axis": K, "failures": failures,
                        "truth": {"points": [r for r in truth.points],
                                  "amplitudes": truth.amplitudes}},
    }, PARAM_HEADER, rows


def _gaussian_kernel_moments(sigma: float, K: int) -> np.ndarray:
    """``int t**p exp(-t**2 / (2 sigma**2)) dt``, ``p = 0..K``."""
    mu = np.zeros(K + 1)
    for p in range(0, K + 1, 2):
        mu[p] = sigma ** (p + 1) * np.sqrt(2 * np.pi) * math.prod(range(p - 1, 0, -2))
    return mu


def _shift_model(p):
    m = p["model"]
    shifts = tuple(float(s) for s in m["shifts"])
    amps = tuple(float(a) for a in m["amplitudes"])
    if len(shifts) != len(amps) or not shifts:
        raise ConfigInvalid("model needs matching nonempty shifts and amplitudes")
    kernel = p["kernel"]
    kind = kernel.get("type")
    if kind not in ("box", "gaussian"):
        raise ConfigInvalid("kernel.type must be 'box' or 'gaussian'")
    return shifts, amps, kind, kernel


def _shift_rows(truth_shifts, truth_amps, est_shifts, est_amps, periodic):
    d = np.asarray(truth_shifts)[:, None] - np.asarray(est_shifts)[None, :]
    if periodic:
        d = np.angle(np.exp(1j * d))
    ri, ci = linear_sum_assignment(np.abs(d))
    rows = []
    for j, q in zip(ri, ci):
        rows.append({"param": f"x[{j}]", "estimate_re": float(est_shifts[q]),
                     "estimate_im": 0.0, "error": float(abs(d[j, q]))})
        a = est_amps[q]
        rows.append({"param": f"a[{j}]", "estimate_re": float(np.real(a)),
                     "estimate_im": float(np.imag(a)),
                     "error": float(abs(a - truth_amps[j]))})
    return rows


def task_shifts_moments(cfg):
    p, opts = cfg.params, _solver_options(cfg)
    shifts, amps, kind, kernel = _shift_model(p)
    N = p.get("N", len(shifts))
    K = 2 * N
    panels = int(p.get("panels", 64))
    if kind == "box":
        w = float(kernel.get("width", 1.0))
        f = BoxShiftsIntegrand(shifts, amps, w)
        interval = (min(shifts) - 0.5, max(shifts) + w + 0.5)
        mu = f.kernel_moments(K)
    else:
        s = float(kernel.get("sigma", 0.3))
        f = GaussianShiftsIntegrand(shifts, amps, s, images=0)
        interval = (min(shifts) - 12 * s, max(shifts) + 12 * s)
        mu = _gaussian_kernel_moments(s, K)
    exact = np.real(compute_moments(QuadratureSpec(f, interval, panels), K))
    eps = float(p.get("noise_eps", 0.0))
    km = _model(KernelMoments, mu)

    def solve(t):
        return recover_shifts_from_moments(km, _noisy(exact, eps, cfg.seed, t), N, **opts)

    results, failures = _run_trials(cfg, solve)
    rows = []
    for t, est in results:
        for r in _shift_rows(shifts, amps, est.nodes.real, est.amplitudes, False):
            rows.append({"trial": t, **r})
    est0 = results[0][1]
    return {
        "solution": {"shifts": est0.nodes, "amplitudes": est0.amplitudes},
        "residuals": {},
        "bounds": _bounds_json(local_error_bounds(est0, eps)),
        "diagnostics": {"noise_eps": eps, "measurements": exact, "kernel_moments": mu,
                        "interval": list(interval), "failures": failures,
                        "truth": {"shifts": list(shifts), "amplitudes": list(amps)}},
    }, PARAM_HEADER, rows


def task_shifts_fourier(cfg):
    p, opts = cfg.params, _solver_options(cfg)
    shifts, amps, kind, kernel = _shift_model(p)
    N = p.get("N", len(shifts))
    K = 2 * N
    panels = int(p.get("panels", 64))
    k = np.arange(K)
    interval = (-np.pi, np.pi)
    if kind == "box":
        w = float(kernel.get("width", 1.0))
        if min(shifts) < -np.pi or max(shifts) + w > np.pi:
            raise ConfigInvalid("boxes must lie inside [-pi, pi]")
        f = BoxShiftsIntegrand(shifts, amps, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            fhat = (np.exp(1j * k * w) - 1) / (1j * k)
        fhat[0] = w
    else:
        s = float(kernel.get("sigma", 0.3))
        f = GaussianShiftsIntegrand(shifts, amps, s)
        fhat = f.kernel_transform(K)
    exact = compute_moments(QuadratureSpec(f, interval, panels, kernel="harmonic"), K)
    eps = float(p.get("noise_eps", 0.0))

    def solve(t):
        fm = FourierMeasurements(_noisy(exact, eps, cfg.seed, t), fhat)
        return recover_shifts_from_fourier(fm, N, **opts)

    results, failures = _run_trials(cfg, solve)
    rows = []
    for t, est in results:
        for r in _shift_rows(shifts, amps, shifts_from_nodes(est), est.amplitudes, True):
            rows.append({"trial": t, **r})
    est0 = results[0][1]
    return {
        "solution": {"shifts": shifts_from_nodes(est0), "nodes": est0.nodes,
                     "amplitudes": est0.amplitudes},
        "residuals": {},
        "bounds": _bounds_json(local_error_bounds(est0, eps)),
        "diagnostics": {"noise_eps": eps, "measurements": exact, "kernel_transform": fhat,
                        "failures": failures,
                        "truth": {"shifts": list(shifts), "amplitudes": list(amps)}},
    }, PARAM_HEADER, rows


PWC_HEADER = ["trial", "eps", "max_jump_error", "piece_error", "l2_error",
              "jump_sum", "moment_residual"]


def task_pwc(cfg):
    p, opts = cfg.params, _solver_options(cfg)
    sig = p["signal"]
    truth = _model(lambda s: PiecewiseConstantSignal.from_pieces(s["breakpoints"], s["values"]),
                   sig)
    if np.any(truth.magnitudes == 0):
        raise ConfigInvalid("adjacent pieces must differ (every breakpoint is a jump)")
    n = p.get("jump_count", truth.jumps.size)
    K = p.get("moments", 2 * n + 1)
    exact = truth.moments(K)
    eps = float(p.get("noise_eps", 0.0))
    if p.get("noise_relative", False):
        eps *= float(np.max(np.abs(exact)))
    refine = bool(p.get("refine", True))

    def solve(t):
        return reconstruct_piecewise_constant(_noisy(exact, eps, cfg.seed, t), n,
                                              refine=refine, **opts)

    results, failures = _run_trials(cfg, solve)
    rows = []
    for t, est in results:
        same = est.jumps.size == truth.jumps.size
        rows.append({
            "trial": t, "eps": eps,
            "max_jump_error": float(np.max(np.abs(est.jumps - truth.jumps))) if same else float("nan"),
            "piece_error": (float(np.linalg.norm(est.values - truth.values)
                                  / np.linalg.norm(truth.values)) if same else float("nan")),
            "l2_error": l2_distance(est, truth) / l2_norm(truth),
            "jump_sum": est.diagnostics["jump_sum"],
            "moment_residual": est.diagnostics["moment_residual"],
        })
    est0 = results[0][1]
    return {
        "solution": {"jumps": est0.jumps, "values": est0.values,
                     "magnitudes": est0.magnitudes},
        "residuals": {"moment_residual": est0.diagnostics["moment_residual"],
                      "mass_residual": est0.diagnostics["mass_residual"],
                      "jump_sum": est0.diagnostics["jump_sum"]},
        "bounds": {},
        "diagnostics": {"noise_eps": eps, "moments": K, "failures": failures,
                        "truth": {"jumps": truth.jumps, "values": truth.values,
                                  "magnitudes": truth.magnitudes}},
    }, PWC_HEADER, rows


STABILITY_HEADER = ["eps", "trial", "param", "error", "bound"]


def task_stability_sweep(cfg, serial=False):
    p, opts = cfg.params, _solver_options(cfg)
    model = p["model"]
    if model.get("multiplicities") is not None or model.get("confluent", False):
        sol = _model(lambda m: ConfluentPronySolution(
            parse_values(m["nodes"]), tuple(parse_values(np.atleast_1d(a).tolist())
                                            for a in m["amplitudes"])), model)
    else:
        sol = _model(lambda m: PronySolution(parse_values(m["nodes"]),
                                                 parse_values(m["amplitudes"])), model)
    eps_grid = [float(e) for e in p["eps_grid"]]
    if not eps_grid:
        raise ConfigInvalid("eps_grid must not be empty")
    rep = noise_experiment(sol, eps_grid, cfg.trials, cfg.seed,
                           slack=float(p.get("slack", 2.0)),
                           noise=p.get("noise", "uniform"), serial=serial, **opts)
    result = {
        "solution": (_confluent_solution_json(sol) if isinstance(sol, ConfluentPronySolution)
                     else {"nodes": sol.nodes, "amplitudes": sol.amplitudes}),
        "residuals": {},
        "bounds": {**_bounds_json(rep), "per_unit_eps": True},
        "diagnostics": {"slopes": rep.slopes, "max_errors": rep.max_errors,
                        "containment": rep.containment, "violations": rep.violations,
                        "trials_checked": rep.trials_checked, "failures": rep.failures,
                        "eps_grid": eps_grid, "slack": float(p.get("slack", 2.0))},
    }
    extra = {}
    sweep = p.get("amplitude_sweep")
    if sweep:
        if not isinstance(sol, PronySolution):
            raise ConfigInvalid("amplitude_sweep needs a classical model")
        if "scales" in sweep:
            scales = [float(s) for s in sweep["scales"]]
        else:
            lo, hi, count = sweep.get("exponents", [0, 3, 7])
            scales = np.logspace(float(lo), float(hi), int(count)).tolist()
        sw = amplitude_sweep(sol, int(sweep.get("index", 0)), scales,
                             float(sweep.get("eps", 1e-7)),
                             int(sweep.get("trials", cfg.trials)), cfg.seed,
                             serial=serial, **opts)
        result["diagnostics"]["amplitude_sweep"] = {
            "index": sw.index, "magnitudes": sw.magnitudes,
            "node_errors": [r for r in sw.node_errors], "slope": sw.slope,
            "other_ratio": sw.other_ratio}
        extra["amplitude_sweep.csv"] = (["magnitude"] + STABILITY_HEADER, sw.records)
    return result, STABILITY_HEADER, rep.records, extra


TASK_FUNCS = {
    "solve-prony": task_solve_prony,
    "solve-confluent": task_solve_confluent,
    "solve-md": task_solve_md,
    "shifts-moments": task_shifts_moments,
    "shifts-fourier": task_shifts_fourier,
    "pwc": task_pwc,
}


# ---------------------------------------------------------------- driver

def _provenance(cfg: ExperimentConfig) -> dict:
    return {"schema_version": SCHEMA_VERSION, "task": cfg.task, "version": __version__,
            "config": cfg.echo(), "seed": cfg.seed}


def run_experiment(cfg: ExperimentConfig, out: Path | None = None,
                   serial: bool = False) -> int:
    """Run one configured task, writing ``result.json`` and ``table.csv``.

    Returns the exit status (0 success, 2 solver failure).
    """
    out = Path(out if out is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    head = _provenance(cfg)
    try:
        if cfg.task == "stability-sweep":
            body, header, rows, extra = task_stability_sweep(cfg, serial=serial)
        else:
            body, header, rows = TASK_FUNCS[cfg.task](cfg)
            extra = {}
    except ConfigInvalid:
        raise
    except PronyError as exc:
        write_json(out / "result.json",
                   {**head, "error": {"type": type(exc).__name__, "message": str(exc)}})
        return 2
    write_json(out / "result.json", {**head, **body})
    write_csv(out / "table.csv", header, rows)
    for name, (h, r) in extra.items():
        write_csv(out / name, h, r)
    return 0


def result_schema() -> dict:
    return json.loads(resources.files("prony_lab").joinpath("schemas/result-v1.json").read_text())


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="prony-lab", description=__doc__.splitlines()[0])
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("--config", required=True, help="YAML experiment config")
    ap.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    ap.add_argument("--out", default=None, help="output directory (overrides config)")
    ap.add_argument("--serial", action="store_true", help="disable trial parallelism")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, {"seed": args.seed, "out": args.out},
                          default_task=args.task)
        if cfg.task != args.task:
            raise ConfigInvalid(f"config is for task {cfg.task!r}, not {args.task!r}")
        return run_experiment(cfg, serial=args.serial)
    except ConfigInvalid as exc:
        print(json.dumps({"error": {"type": "ConfigInvalid", "message": str(exc)}}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
