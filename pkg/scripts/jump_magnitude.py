"""Location error of one node versus its amplitude magnitude.

Scales amplitude ``--index`` over ``10**0 .. 10**3`` at fixed noise and
reports the fitted log-log slope of its worst location error (expected
close to -1) and how much the other nodes' errors move.

    python3 scripts/jump_magnitude.py
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from prony_lab import PronySolution, amplitude_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=float, nargs="+", default=[0.2, 0.5, 0.8])
    ap.add_argument("--amplitudes", type=float, nargs="+", default=[1.0, -1.5, 0.8])
    ap.add_argument("--index", type=int, default=0)
    ap.add_argument("--eps", type=float, default=1e-7)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--serial", action="store_true")
    ap.add_argument("--out", default="results/jump_magnitude.csv")
    args = ap.parse_args(argv)

    sol = PronySolution(args.nodes, args.amplitudes)
    sw = amplitude_sweep(sol, args.index, np.logspace(0, 3, 7), args.eps, args.trials,
                         args.seed, serial=args.serial)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["magnitude"] + [f"x[{j}]" for j in range(sol.size)])
        for mag, errs in zip(sw.magnitudes, sw.node_errors):
            w.writerow([f"{mag:.16e}"] + [f"{e:.16e}" for e in errs])
    print(f"slope of |dx_{args.index}| vs |a_{args.index}|: {sw.slope:.4f}")
    print(f"other nodes vary by a factor {sw.other_ratio:.3f}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
