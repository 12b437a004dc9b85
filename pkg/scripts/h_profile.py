#!/usr/bin/env python3
"""
Tabulate the renormalized zero resolvent h across models
========================================================

Writes one CSV with h(x) for standard BM, a stable process, and a
jump-diffusion on a shared grid, plus the extrapolation error estimate
for each value.  Useful for eyeballing the |x| (BM) versus |x|^(alpha-1)
(stable) growth and for checking that the q->0 extrapolation stays well
converged over the whole grid.

Usage:
    python scripts/h_profile.py --x-max 4 --n 33 --out h_profile.csv
"""

import argparse
import csv
import sys

import numpy as np

from levypen import HFunction, ModelSpec


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--x-max", type=float, default=4.0)
    ap.add_argument("--n", type=int, default=33)
    ap.add_argument("--alpha", type=float, default=1.5)
    ap.add_argument("--jump-rate", type=float, default=1.0)
    ap.add_argument("--jump-std", type=float, default=1.0)
    ap.add_argument("--out", default="h_profile.csv")
    return ap.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    grid = np.linspace(-args.x_max, args.x_max, args.n)
    hfs = {
        "bm": HFunction(ModelSpec.brownian()),
        "stable": HFunction(ModelSpec.stable(args.alpha)),
        "bm_jumps": HFunction(ModelSpec.brownian_with_jumps(
            1.0, args.jump_rate, args.jump_std)),
    }
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [f"h_{k}" for k in hfs]
                   + [f"err_{k}" for k in hfs])
        for x in grid:
            hs = [hf.h(float(x)) for hf in hfs.values()]
            errs = [hf.h_err_estimate(float(x)) for hf in hfs.values()]
            w.writerow([f"{v:.12g}" for v in [x] + hs + errs])
    print(f"wrote {args.out} ({args.n} points, models: {', '.join(hfs)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
