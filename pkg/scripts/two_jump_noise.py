"""Two-jump piecewise-constant reconstruction versus moment noise.

For each relative noise level, reconstructs a box signal from its first
``2n + 1`` (or ``--moments``) moments over many noise draws and writes the
median and worst jump, piece-value and L2 errors to a CSV.

    python3 scripts/two_jump_noise.py
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from prony_lab import PiecewiseConstantSignal, PronyError, l2_distance, l2_norm, \
    reconstruct_piecewise_constant
from prony_lab.stability import unit_noise


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--breakpoints", type=float, nargs=2, default=[0.25, 0.7])
    ap.add_argument("--height", type=float, default=1.5)
    ap.add_argument("--moments", type=int, default=5)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default="results/two_jump_noise.csv")
    args = ap.parse_args(argv)

    truth = PiecewiseConstantSignal.from_pieces(args.breakpoints, [args.height])
    m = truth.moments(args.moments)
    scale = float(np.max(np.abs(m)))
    rows = []
    for rel in [0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2]:
        jump, piece, l2, failed = [], [], [], 0
        for t in range(args.trials if rel else 1):
            try:
                est = reconstruct_piecewise_constant(
                    m + rel * scale * unit_noise(args.seed, t, m.size), 2)
            except PronyError:
                failed += 1
                continue
            jump.append(np.max(np.abs(est.jumps - truth.jumps)))
            piece.append(abs(est.values[0] - truth.values[0]) / abs(truth.values[0]))
            l2.append(l2_distance(est, truth) / l2_norm(truth))
        rows.append({"relative_eps": rel, "jump_median": np.median(jump),
                     "jump_max": np.max(jump), "piece_median": np.median(piece),
                     "piece_max": np.max(piece), "l2_median": np.median(l2),
                     "l2_max": np.max(l2), "failures": failed})
        print(f"eps={rel:7.0e}  jump max {rows[-1]['jump_max']:.2e}  "
              f"piece max {rows[-1]['piece_max']:.2e}  L2 max {rows[-1]['l2_max']:.2e}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.16e}" if isinstance(v, float) else v) for k, v in r.items()})
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
