#!/usr/bin/env python3
"""Fit the decay rate of the bound gaps for n-independent laws.

For each law, prints gap(n) = bound - Pi* for n = 16, 32, ..., 512, the
log-log slope, and n^2 * gap against the limits 1.5*C and 2*pi^2*C.
"""

import math

import numpy as np

from robust_stopping.bounds import lower_bound_uniform, upper_bound_partition
from robust_stopping.distributions import Exponential, Frechet, frechet_base
from robust_stopping.monopoly import solve_monopoly

NS = [16, 32, 64, 128, 256, 512]


def report(name, d):
    m = solve_monopoly(d)
    lo = np.array([lower_bound_uniform(d, n, m) - m.pi_star for n in NS])
    up = np.array([upper_bound_partition(d, n, m) - m.pi_star for n in NS])
    ln = np.log(NS)
    print(f"{name}: Pi*={m.pi_star:.6f} C={m.c_const:.6f}")
    print(f"  {'n':>5} {'n^2 lower gap':>14} {'n^2 upper gap':>14}")
    for n, a, b in zip(NS, lo, up):
        print(f"  {n:>5} {a * n * n:>14.6f} {b * n * n:>14.6f}")
    print(f"  limits: {1.5 * m.c_const:.6f} {2 * math.pi**2 * m.c_const:.6f}")
    print(f"  slopes: lower {np.polyfit(ln, np.log(lo), 1)[0]:.4f}, upper {np.polyfit(ln, np.log(up), 1)[0]:.4f}")


if __name__ == "__main__":
    report("Exp(1)", Exponential())
    report("Frechet(2.197, 0.613)", frechet_base())
    report("Frechet(4, 1)", Frechet(4.0, 1.0))
