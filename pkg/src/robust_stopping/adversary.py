"""Nature's side of the game: worst-case correlated instances.

An instance is a deterministic map from the realised maximum ``v_max`` to a
value sequence whose maximum is ``v_max``. For each threshold-policy class
there is a closed-form minimiser; ``brute_force_adversary`` searches
increasing sequences exhaustively and is used to check the closed forms.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .distributions import MaxDistribution
from .errors import ArityMismatch, InvalidArgument, NoWorstCaseFamily, SearchTooLarge
from .monopoly import revenue
from .policies import Deterministic, FiniteRandom, ThresholdPolicy, UniformRandom

MAX_CANDIDATES = 10_000_000


@dataclass(frozen=True)
class WorstCaseInstance:
    """``builder`` maps an array of maxima (shape ``(N,)``) to values ``(N, n)``."""

    builder: Callable[[np.ndarray], np.ndarray]
    n: int

    def __call__(self, v_max) -> np.ndarray:
        arr = np.asarray(v_max, dtype=float)
        out = self.builder(np.atleast_1d(arr))
        return out[0] if arr.ndim == 0 else out


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")


def instance_against_deterministic(p: float, n: int) -> WorstCaseInstance:
    """``(p, v_max, 0, ...)`` when ``v_max >= p``, else ``(v_max, 0, ...)``.

    The policy stops at ``p`` whenever the maximum clears it, and the maximum
    itself is never collected.
    """
    _check_n(n)
    if n < 2:
        raise InvalidArgument("the deterministic-threshold instance needs n >= 2")

    def build(vm: np.ndarray) -> np.ndarray:
        out = np.zeros((vm.size, n))
        hit = vm >= p
        out[hit, 0] = p
        out[hit, 1] = vm[hit]
        out[~hit, 0] = vm[~hit]
        return out

    return WorstCaseInstance(build, n)


def _slack(policy: FiniteRandom) -> tuple[float, int]:
    """Smallest ``p_i (t_{i+1} - t_i)`` over ``i < n`` and its index."""
    t, p = policy.thresholds, policy.probs
    gaps = [p[i] * (t[i + 1] - t[i]) for i in range(len(t) - 1)]
    if not gaps:
        return math.inf, -1
    i = int(np.argmin(gaps))
    return gaps[i], i


def instance_against_finite_random(policy: FiniteRandom, n: int) -> WorstCaseInstance:
    """Worst case against ``n`` threshold atoms.

    Below ``t_n`` the sequence lists every threshold at most ``v_max`` and then
    ``v_max``. Above ``t_n`` it lists all thresholds but one, dropping the one
    whose omission gives the smallest extra payoff (possibly ``t_n`` itself).
    """
    _check_n(n)
    if policy.m != n:
        raise ArityMismatch(f"policy has {policy.m} thresholds but n = {n}")
    t = np.array(policy.thresholds)
    gamma, drop = _slack(policy)
    p_last = policy.probs[-1]

    kept = np.delete(t, drop) if drop >= 0 else t[: n - 1]

    def build(vm: np.ndarray) -> np.ndarray:
        cols = np.arange(n)
        m = np.searchsorted(t, vm, side="right")[:, None]
        out = np.where(cols < m, t[None, :], 0.0)
        out = np.where(cols == m, vm[:, None], out)
        top = m[:, 0] == n
        if np.any(top):
            rows = np.zeros((int(top.sum()), n))
            v = vm[top]
            cheap = p_last * (v - t[-1]) <= gamma
            rows[:, : n - 1] = np.where(cheap[:, None], t[None, : n - 1], kept[None, :])
            rows[:, n - 1] = v
            out[top] = rows
        return out

    return WorstCaseInstance(build, n)


def worst_tuple_uniform(t1: float, t2: float, n: int, v_max: float) -> tuple[float, ...]:
    """Minimising sequence against ``T ~ U(t1, t2)`` for one realised maximum."""
    return tuple(float(x) for x in _uniform_rows(t1, t2, n, np.array([float(v_max)]))[0])


def _uniform_rows(t1: float, t2: float, n: int, vm: np.ndarray) -> np.ndarray:
    if not t1 < t2:
        raise InvalidArgument(f"need t1 < t2, got ({t1}, {t2})")
    if n < 2:
        raise InvalidArgument("the uniform-threshold instance needs n >= 2")
    i = np.arange(1, n + 1)
    knee = t2 + (t2 - t1) / (n - 1)
    out = np.zeros((vm.size, n))
    below = vm < t1
    ramp = (vm >= t1) & (vm <= knee)
    above = vm > knee
    out[below, 0] = vm[below]
    out[ramp] = t1 + np.outer(vm[ramp] - t1, i / n)
    if np.any(above):
        steps = t1 + i[:-1] * (t2 - t1) / (n - 1)
        out[above, : n - 1] = steps
        out[above, n - 1] = vm[above]
    return out


def instance_against_uniform(t1: float, t2: float, n: int) -> WorstCaseInstance:
    _uniform_rows(t1, t2, n, np.zeros(0))  # validate eagerly
    return WorstCaseInstance(lambda vm: _uniform_rows(t1, t2, n, vm), n)


def instance_for_policy(policy: ThresholdPolicy, n: int) -> WorstCaseInstance:
    if isinstance(policy, Deterministic):
        return instance_against_deterministic(policy.t, n)
    if isinstance(policy, FiniteRandom):
        return instance_against_finite_random(policy, n)
    if isinstance(policy, UniformRandom):
        return instance_against_uniform(policy.lo, policy.hi, n)
    raise NoWorstCaseFamily(f"no worst-case instance family for {type(policy).__name__}")


def min_payoff_finite_random(d: MaxDistribution, policy: FiniteRandom, n: int) -> float:
    """Worst-case expected payoff of an ``n``-atom random threshold.

    ``sum_i p_i t_i P(X >= t_i) + E[min(gamma, p_n (X - t_n)); X >= t_n]``,
    which splits into the survival term at ``t_n + gamma/p_n`` and a partial
    expectation below it.
    """
    if policy.m != n:
        raise ArityMismatch(f"policy has {policy.m} thresholds but n = {n}")
    t, p = policy.thresholds, policy.probs
    base = math.fsum(pi * ti * d.survival(ti) for ti, pi in zip(t, p))
    gamma, _ = _slack(policy)
    tn, pn = t[-1], p[-1]
    if pn == 0:
        return base
    cut = tn + gamma / pn
    # E[(X - t_n); t_n <= X < cut], the atom at ``cut`` excluded
    if math.isfinite(cut):
        atom_at_cut = d.cdf(cut) - d.cdf_left(cut)
        head = d.partial_expectation(tn, cut) - cut * atom_at_cut
        mass = d.survival(tn) - d.survival(cut)
        extra = pn * (head - tn * mass) + gamma * d.survival(cut)
    else:
        extra = pn * (d.partial_expectation(tn) - tn * d.survival(tn))
    return base + extra


def _f1(s, t1: float, t2: float, n: int):
    return (s - t1) / (t2 - t1) * (t1 + (n + 1) * (s - t1) / (2 * n))


def _f2(s, t1: float, t2: float, n: int):
    return s - (n - 1) * (s - t1) ** 2 / (2 * n * (t2 - t1))


def min_payoff_uniform(d: MaxDistribution, t1: float, t2: float, n: int, exact: bool = True) -> float:
    """Worst-case expected payoff of ``T ~ U(t1, t2)`` with ``n`` values.

    ``exact=False`` gives the cheaper lower bound that freezes the payoff at
    its value at ``t2`` for every larger maximum.
    """
    if not t1 < t2:
        raise InvalidArgument(f"need t1 < t2, got ({t1}, {t2})")
    if n < 2:
        raise InvalidArgument("min_payoff_uniform needs n >= 2")
    knee = t2 + (t2 - t1) / (n - 1)
    ramp = d.expect(lambda s: _f1(s, t1, t2, n), t1, t2)
    if not exact:
        return ramp + _f2(t2, t1, t2, n) * (1.0 - d.cdf(t2))
    bend = d.expect(lambda s: _f2(s, t1, t2, n), t2, knee, include_lo=False)
    return ramp + bend + _f2(knee, t1, t2, n) * (1.0 - d.cdf(knee))


def tilde_revenue(d: MaxDistribution, p_star: float, n: int, eps: float) -> float:
    """Payoff of the ``eps``-grid policy with the nonnegative last term dropped."""
    avg = math.fsum(revenue(d, p_star - i * eps) for i in range(n)) / n
    return avg + eps / n * d.survival(p_star + eps)


def discretize(d: MaxDistribution, points: int = 2000) -> list[tuple[float, float]]:
    """``(value, prob)`` pairs: the atoms of a discrete law, else quantile midpoints."""
    if not d.has_density:
        return [(x, m) for x, m in d.atoms()]
    levels = (np.arange(points) + 0.5) / points
    xs = d.quantile_array(levels)
    return [(float(x), 1.0 / points) for x in xs]


def _count_prefixes(size: int, longest: int) -> int:
    return sum(math.comb(size, k) for k in range(longest + 1))


def brute_force_adversary(
    d_grid: Sequence[tuple[float, float]],
    policy: ThresholdPolicy,
    n: int,
    value_grid: Sequence[float],
) -> float:
    """Minimum expected payoff over increasing sequences drawn from a grid.

    For each ``(v_max, prob)`` the candidates are every strictly increasing
    run of at most ``n - 1`` grid values below ``v_max`` followed by
    ``v_max``. The payoff of a run is a sum of terms that each involve two
    consecutive entries, so the minimum over all runs ending at a given value
    is accumulated one length at a time. That is an exact minimum over the
    same candidate set, not a heuristic.

    A uniform threshold is replaced by 200 equiprobable atoms.
    """
    _check_n(n)
    if isinstance(policy, UniformRandom):
        policy = policy.discretize(200)
    grid = np.unique(np.asarray(value_grid, dtype=float))
    if np.any(grid < 0):
        raise InvalidArgument("value grid must be nonnegative")
    total = _count_prefixes(grid.size, n - 1)
    if total > MAX_CANDIDATES:
        raise SearchTooLarge(f"{total} candidate runs exceed the {MAX_CANDIDATES} limit")

    fg = policy.cdf(grid)
    # best[j]: least payoff of a run ending at grid[j], over lengths so far
    best_any = np.full(grid.size, np.inf)
    layer = grid * fg  # runs of length one
    for length in range(1, n):
        best_any = np.minimum(best_any, layer)
        if length == n - 1:
            break
        # extend a run ending at i < j by grid[j]
        step = layer[:, None] + grid[None, :] * (fg[None, :] - fg[:, None])
        step[np.tril_indices(grid.size)] = np.inf
        layer = step.min(axis=0)

    vm = np.array([v for v, _ in d_grid], dtype=float)
    w = np.array([m for _, m in d_grid], dtype=float)
    f_vm = policy.cdf(vm)
    values = vm * f_vm  # the run consisting of v_max alone
    if n > 1 and grid.size:
        # closing term v_max (F(v_max) - F(u_k)) for the last run entry u_k < v_max
        close = best_any[None, :] + vm[:, None] * (f_vm[:, None] - fg[None, :])
        close[grid[None, :] >= vm[:, None]] = np.inf
        values = np.minimum(values, close.min(axis=1))
    return float(np.dot(w, values))
