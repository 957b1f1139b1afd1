"""Small scalar numerics: adaptive Simpson quadrature, golden-section search
and predicate bisection.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

MAX_INTERVALS = 1_000_000


class QuadratureError(RuntimeError):
    pass


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_intervals: int = MAX_INTERVALS,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson's rule.

    ``tol`` is an absolute tolerance for the whole interval; each accepted
    panel gets a share proportional to its width. Raises ``QuadratureError``
    once more than ``max_intervals`` panels have been created.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_intervals)

    width = b - a
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = width / 6.0 * (fa + 4.0 * fm + fb)
    # (lo, hi, f(lo), f(mid), f(hi), simpson estimate, depth)
    stack = [(a, b, fa, fm, fb, whole, 0)]
    total = 0.0
    created = 1
    while stack:
        lo, hi, flo, fmid, fhi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        h = hi - lo
        left = h / 12.0 * (flo + 4.0 * flm + fmid)
        right = h / 12.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        local_tol = tol * h / width
        if abs(delta) <= 15.0 * local_tol or depth >= 60 or h <= 1e-15 * max(1.0, abs(mid)):
            total += left + right + delta / 15.0
            continue
        created += 2
        if created > max_intervals:
            raise QuadratureError(f"adaptive Simpson exceeded {max_intervals} subintervals on [{a}, {b}]")
        stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
    return total


def integrate_pieces(
    f: Callable[[float], float],
    points: Iterable[float],
    tol: float = 1e-10,
) -> float:
    """Integrate across consecutive breakpoints, splitting ``tol`` evenly.

    Use this to keep kinks of the integrand on panel boundaries.
    """
    pts = sorted(set(float(p) for p in points))
    if len(pts) < 2:
        return 0.0
    share = tol / (len(pts) - 1)
    return math.fsum(adaptive_simpson(f, lo, hi, share) for lo, hi in zip(pts[:-1], pts[1:]))


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10
) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` with the bracket shrunk below ``tol``. Only
    reliable when ``f`` is unimodal on the bracket.
    """
    a, b = min(a, b), max(a, b)
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def bisect_predicate(
    pred: Callable[[float], bool],
    lo: float,
    hi: float,
    *,
    xtol: float = 0.0,
    rtol: float = 0.0,
    max_iter: int = 200,
) -> float:
    """Smallest ``x`` in ``[lo, hi]`` where a monotone predicate flips to true.

    Assumes ``pred(hi)`` holds and ``pred`` is false-then-true on the
    bracket. Returns the right end of the final bracket, so the predicate
    holds at the returned point.
    """
    if pred(lo):
        return lo
    for _ in range(max_iter):
        if hi - lo <= max(xtol, rtol * abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def central_difference(f: Callable[[float], float], x: float, order: int, h: float) -> float:
    """Central finite-difference estimate of the ``order``-th derivative."""
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    if order == 3:
        return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2.0 * h**3)
    raise ValueError(f"unsupported derivative order {order}")


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den
