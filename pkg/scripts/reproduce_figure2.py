#!/usr/bin/env python3
"""Bounds for the Frechet example (mean 1, variance 3) under sqrt(n) scaling.

Writes the left-panel table for n = 2..50 and the rescaled constants of the
right panel at a few larger n. Output is CSV on stdout unless --out is given.
"""

import argparse
import math
import sys

from robust_stopping.cli import bound_row, render_rows
from robust_stopping.distributions import frechet_base
from robust_stopping.monopoly import solve_monopoly


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=50)
    ap.add_argument("--right", default="100,200,400,900", help="n values for the rescaled constants")
    ap.add_argument("--out")
    args = ap.parse_args()

    base = frechet_base()
    rows = [bound_row(base, n, "sqrt_n", 10.0) for n in range(2, args.n_max + 1)]
    text = render_rows(rows, "csv")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    c = solve_monopoly(base).c_const
    print(f"\n# limits: 1.5*C = {1.5 * c:.4f}, 2*pi^2*C = {2 * math.pi**2 * c:.4f}", file=sys.stderr)
    print("# n, lower constant, upper constant, envelope constant", file=sys.stderr)
    for n in map(int, args.right.split(",")):
        row = bound_row(base, n, "sqrt_n", 10.0)
        env = (row["upper_envelope"] - row["lower_det"]) * n * n / math.sqrt(n)
        print(f"{n}, {row['lower_const']:.4f}, {row['upper_const']:.4f}, {env:.4f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
