"""Lower and upper bounds on the robust stopping value ``V*(F, n)``.

* ``lower_det``: the monopoly revenue, guaranteed by a fixed threshold.
* ``lower_uniform``: exact worst-case payoff of a uniform threshold on
  ``(p* - eps, p* + eps)`` with ``eps = 3 S(p*) / (2F'(p*) + p* F''(p*)) / n``.
* ``upper_universal``: ``Pi* + E[X]/n``.
* ``upper_partition``: ``Pi* + eps*`` where ``eps*`` is the least slack for
  which the map ``w -> (Pi* + eps) / P(X >= w)``, started at the support's
  lower end, reaches the cutoff ``beta`` within ``n - 1`` steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .adversary import min_payoff_uniform
from .distributions import MaxDistribution
from .errors import (
    BoundInconsistency,
    DegenerateCurvature,
    DivergentMean,
    Infeasible,
    InvalidArgument,
    NotProgressing,
    PreconditionFailed,
    RobustStoppingError,
)
from .monopoly import MonopolyResult, c_constant, solve_monopoly
from .numerics import bisect_predicate

MAX_STEPS = 10_000_000
SANDWICH_TOL = 1e-9
DEFAULT_C2 = 10.0


def _mono(d: MaxDistribution, mono: MonopolyResult | None) -> MonopolyResult:
    return mono if mono is not None else solve_monopoly(d)


def uniform_half_width(d: MaxDistribution, n: int, mono: MonopolyResult | None = None) -> float:
    """Half-width ``eps(n)`` of the uniform threshold window around ``p*``."""
    m = _mono(d, mono)
    curvature = 2.0 * d.derivative(m.p_star, 1) + m.p_star * d.derivative(m.p_star, 2)
    if curvature <= 1e-12:
        raise DegenerateCurvature(f"2F'(p*) + p*F''(p*) = {curvature:.3e} is not positive")
    return 3.0 * d.survival(m.p_star) / curvature / n


def lower_bound_uniform(d: MaxDistribution, n: int, mono: MonopolyResult | None = None) -> float:
    """Exact worst-case payoff of the uniform window policy.

    Requires a smooth law with a unique monopoly price and
    ``eps(n) < min(1, p*)``.
    """
    if n < 2:
        raise InvalidArgument(f"n must be at least 2, got {n}")
    if not d.has_density or not d.is_continuous:
        raise PreconditionFailed("the uniform-window bound needs a continuous law")
    m = _mono(d, mono)
    if not m.unique:
        raise PreconditionFailed("the monopoly price is not unique on the search grid")
    try:
        eps = uniform_half_width(d, n, m)
    except DegenerateCurvature as exc:
        raise PreconditionFailed(str(exc)) from exc
    if eps >= 1.0 or eps >= m.p_star:
        raise PreconditionFailed(f"window half-width {eps:.6g} must be below min(1, p*={m.p_star:.6g})")
    return min_payoff_uniform(d, m.p_star - eps, m.p_star + eps, n, exact=True)


def upper_bound_universal(d: MaxDistribution, n: int, mono: MonopolyResult | None = None) -> float:
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    if not d.has_finite_mean:
        raise DivergentMean(f"{d!r} has an infinite mean")
    return _mono(d, mono).pi_star + d.mean / n


def beta_cutoff(d: MaxDistribution, pi_star: float | None = None, p_star: float | None = None) -> float:
    """Smallest ``s >= p*`` with ``E[X; X >= s] <= Pi*``."""
    if not d.has_finite_mean:
        raise DivergentMean(f"{d!r} has an infinite mean")
    if pi_star is None or p_star is None:
        m = solve_monopoly(d)
        pi_star, p_star = m.pi_star, m.p_star

    def settled(s: float) -> bool:
        return d.partial_expectation(s) <= pi_star

    hi = max(d.upper_quantile(), p_star)
    while not settled(hi):
        hi *= 2.0
    return bisect_predicate(settled, p_star, hi, xtol=1e-13, rtol=1e-15)


def count_iterations(
    d: MaxDistribution,
    pi_star: float,
    eps: float,
    w0: float,
    beta: float,
    max_steps: int = MAX_STEPS,
) -> int:
    """Steps of ``w -> (Pi* + eps) / P(X >= w)`` from ``w0`` until ``w >= beta``.

    Returns ``max_steps + 1`` if the budget runs out before ``beta`` is
    reached and ``max_steps`` is below the hard cap; at the hard cap it raises.
    """
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    if not w0 < beta:
        raise InvalidArgument(f"need w0 < beta, got w0={w0}, beta={beta}")
    level = pi_star + eps
    w, k = w0, 0
    while w < beta:
        s = d.survival(w)
        nxt = level / s if s > 0 else math.inf
        if nxt - w < 1e-15:
            raise NotProgressing(f"step from w={w:.17g} moved by {nxt - w:.3e}; eps={eps:.3e} is too small")
        w, k = nxt, k + 1
        if k >= max_steps and w < beta:
            if max_steps >= MAX_STEPS:
                raise NotProgressing(f"no crossing of beta within {MAX_STEPS} steps")
            return max_steps + 1
    return k


@dataclass(frozen=True)
class PartitionBound:
    value: float
    eps: float
    steps: int
    beta: float


def partition_bound(d: MaxDistribution, n: int, mono: MonopolyResult | None = None) -> PartitionBound:
    """Least slack ``eps`` whose partition reaches ``beta`` in ``n - 1`` steps.

    The bisection bracket's right end, ``max(E[X], beta - Pi*)``, is always
    feasible: the first step from the support's lower end already lands on
    ``Pi* + eps >= beta``.
    """
    if n < 2:
        raise InvalidArgument(f"the partition bound needs n >= 2, got {n}")
    if not d.has_finite_mean:
        raise DivergentMean(f"{d!r} has an infinite mean")
    m = _mono(d, mono)
    beta = beta_cutoff(d, m.pi_star, m.p_star)
    w0 = d.support_lo
    if w0 >= beta:
        raise Infeasible(f"support starts at {w0} which is already beyond beta={beta}")
    budget = n - 1

    def feasible(eps: float) -> bool:
        if eps <= 0:
            return False
        try:
            return count_iterations(d, m.pi_star, eps, w0, beta, max_steps=budget) <= budget
        except NotProgressing:
            return False

    hi = max(d.mean, beta - m.pi_star)
    while m.pi_star + hi < beta:  # rounding in beta - Pi*
        hi = math.nextafter(hi, math.inf)
    if not feasible(hi):
        raise Infeasible(f"even eps={hi:.6g} needs more than {budget} steps")
    eps = bisect_predicate(feasible, 0.0, hi, rtol=1e-6)
    steps = count_iterations(d, m.pi_star, eps, w0, beta, max_steps=budget)
    return PartitionBound(m.pi_star + eps, eps, steps, beta)


def upper_bound_partition(d: MaxDistribution, n: int, mono: MonopolyResult | None = None) -> float:
    return partition_bound(d, n, mono).value


def upper_envelope(d: MaxDistribution, n: int, c2: float = DEFAULT_C2, mono: MonopolyResult | None = None) -> float:
    """Asymptotic upper envelope ``Pi* + 2 pi^2 C / (n - c2)^2`` for ``n > c2``."""
    if not n > c2:
        raise InvalidArgument(f"the envelope needs n > c2 = {c2}, got {n}")
    m = _mono(d, mono)
    c = m.c_const if m.c_const is not None else c_constant(d, m.p_star)
    return m.pi_star + 2.0 * math.pi**2 * c / (n - c2) ** 2


@dataclass(frozen=True)
class BoundReport:
    n: int
    lower_det: float
    lower_uniform: float | None
    upper_universal: float
    upper_partition: float | None
    meta: dict = field(default_factory=dict)

    @property
    def upper(self) -> float:
        ups = [u for u in (self.upper_universal, self.upper_partition) if u is not None]
        return min(ups)

    @property
    def lower(self) -> float:
        lows = [x for x in (self.lower_det, self.lower_uniform) if x is not None]
        return max(lows)


def _check_sandwich(r: BoundReport) -> None:
    scale = max(1.0, abs(r.upper))
    chain = [("lower_det", r.lower_det)]
    if r.lower_uniform is not None:
        chain.append(("lower_uniform", r.lower_uniform))
    for up_name, up in (("upper_universal", r.upper_universal), ("upper_partition", r.upper_partition)):
        if up is None:
            continue
        for low_name, low in chain:
            if low > up + SANDWICH_TOL * scale:
                raise BoundInconsistency(f"n={r.n}: {low_name}={low:.12g} exceeds {up_name}={up:.12g}")
    if r.lower_uniform is not None and r.lower_uniform < r.lower_det - SANDWICH_TOL * scale:
        raise BoundInconsistency(
            f"n={r.n}: lower_uniform={r.lower_uniform:.12g} is below lower_det={r.lower_det:.12g}"
        )


def bound_report(d: MaxDistribution, n: int, *, check: bool = True) -> BoundReport:
    """All four bounds with provenance; unavailable entries are ``None``.

    With ``check=True`` a violated ordering raises ``BoundInconsistency``.
    """
    m = solve_monopoly(d)
    meta: dict = {
        "p_star": m.p_star,
        "c_const": m.c_const,
        "unique": m.unique,
        "provenance": {
            "lower_det": "fixed threshold at the monopoly price",
            "upper_universal": "monopoly revenue plus mean / n",
        },
        "skipped": {},
    }
    prov, skipped = meta["provenance"], meta["skipped"]

    lower_uniform = None
    try:
        lower_uniform = lower_bound_uniform(d, n, m)
        meta["eps_uniform"] = uniform_half_width(d, n, m)
        prov["lower_uniform"] = "exact worst case of a uniform window around p*"
    except RobustStoppingError as exc:
        skipped["lower_uniform"] = f"{type(exc).__name__}: {exc}"

    universal = upper_bound_universal(d, n, m)
    upper_partition = None
    try:
        pb = partition_bound(d, n, m)
        upper_partition = pb.value
        meta.update(eps_partition=pb.eps, steps=pb.steps, beta=pb.beta)
        prov["upper_partition"] = "iterated partition reaching beta in n - 1 steps"
    except Infeasible as exc:
        upper_partition = universal
        skipped["upper_partition"] = f"Infeasible: {exc}"
        prov["upper_partition"] = "fallback to the universal bound"
    except RobustStoppingError as exc:
        skipped["upper_partition"] = f"{type(exc).__name__}: {exc}"

    report = BoundReport(n, m.pi_star, lower_uniform, universal, upper_partition, meta)
    if check:
        _check_sandwich(report)
    return report
