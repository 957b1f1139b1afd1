"""Revenue curve ``p * P(X >= p)``, its maximiser and the curvature constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import MaxDistribution, PointMasses
from .errors import DegenerateCurvature, DivergentMean, InvalidArgument
from .numerics import golden_section_max

GRID_POINTS = 10_000
GRID_LEVEL = 1.0 - 1e-9


@dataclass(frozen=True)
class MonopolyResult:
    p_star: float
    pi_star: float
    c_const: float | None
    unique: bool


def revenue(d: MaxDistribution, p: float) -> float:
    if p < 0:
        raise InvalidArgument(f"price must be nonnegative, got {p}")
    if p == 0:
        return 0.0
    return p * d.survival(p)


def _price_grids(d: MaxDistribution) -> tuple[np.ndarray, np.ndarray]:
    hi = d.quantile(GRID_LEVEL)
    if math.isfinite(d.support_hi):
        hi = max(hi, d.support_hi)
    linear = np.linspace(d.support_lo, hi, GRID_POINTS)
    # heavy tails push `hi` far out; quantile points keep the body resolved
    levels = np.linspace(0.0, GRID_LEVEL, GRID_POINTS + 1)[1:]
    return linear, np.unique(np.concatenate([linear, d.quantile_array(levels)]))


def _polish(d: MaxDistribution, lo: float, hi: float) -> float | None:
    """Root of the first-order condition S(p) - p F'(p) = 0 inside [lo, hi]."""
    def foc(p: float) -> float:
        return d.survival(p) - p * d.derivative(p, 1)

    lo = max(lo, 1e-300)
    f_lo, f_hi = foc(lo), foc(hi)
    if not (f_lo > 0 > f_hi):
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if foc(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_monopoly(d: MaxDistribution) -> MonopolyResult:
    """Maximise the revenue curve.

    Grid search followed by golden-section refinement of the best cell;
    exact enumeration for purely atomic laws. Ties go to the smallest price.
    """
    if not d.has_finite_mean:
        raise DivergentMean(f"{d!r} has infinite mean; the revenue curve is unbounded in scale")

    atoms = [x for x, _ in d.atoms()]
    if isinstance(d, PointMasses) or not d.has_density:
        revs = [revenue(d, x) for x in atoms]
        best = max(revs)
        winners = [x for x, r in zip(atoms, revs) if r >= best - 1e-12 * max(1.0, best)]
        p_star = winners[0]
        return MonopolyResult(p_star, revenue(d, p_star), None, len(winners) == 1)

    linear, grid = _price_grids(d)
    revs = np.array([revenue(d, float(p)) for p in grid])
    top = float(revs.max())
    near = np.flatnonzero(revs >= top - 1e-12 * max(1.0, top))
    i = int(near[0])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    p_ref, r_ref = golden_section_max(lambda p: revenue(d, p), lo, hi, tol=1e-10)

    candidates = [(float(grid[i]), float(revs[i])), (p_ref, r_ref)]
    candidates += [(x, revenue(d, x)) for x in atoms]
    p_pol = _polish(d, lo, hi)
    if p_pol is not None:
        candidates.append((p_pol, revenue(d, p_pol)))
    best = max(r for _, r in candidates)
    tied = [p for p, r in candidates if r >= best - 1e-14 * max(1.0, best)]
    # a stationary point beats golden-section noise on a flat top
    if p_pol is not None and p_pol in tied and min(tied) > p_pol - 1e-6 * max(1.0, p_pol):
        p_star = p_pol
    else:
        p_star = min(tied)
    pi_star = revenue(d, p_star)

    # near-optimal prices must form one run no wider than 10 linear cells
    cell = float(linear[1] - linear[0])
    close = np.flatnonzero(revs >= max(top, pi_star) - 1e-6)
    contiguous = bool(close.max() - close.min() == len(close) - 1)
    unique = contiguous and float(grid[close.max()] - grid[close.min()]) <= 10.0 * cell

    try:
        c = c_constant(d, p_star)
    except DegenerateCurvature:
        c = None
    return MonopolyResult(p_star, pi_star, c, unique)


def c_constant(d: MaxDistribution, p_star: float) -> float:
    """``(1 - F(p*))^2 / (2 F'(p*) + p* F''(p*))``."""
    curvature = 2.0 * d.derivative(p_star, 1) + p_star * d.derivative(p_star, 2)
    if curvature <= 1e-12:
        raise DegenerateCurvature(
            f"2F'(p*) + p*F''(p*) = {curvature:.3e} at p* = {p_star}; the maximiser is not strict"
        )
    return d.survival(p_star) ** 2 / curvature
