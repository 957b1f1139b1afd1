"""Threshold stopping rules and their payoff on a fixed sequence of values.

A threshold policy draws ``T`` once, before any value is seen, and stops at
the first index with ``v_i >= T``. If ``M_i`` is the running maximum of the
first ``i`` values, index ``i`` is chosen exactly when ``M_{i-1} < T <= M_i``,
so the expected payoff is ``sum_i v_i [F_T(M_i) - F_T(M_{i-1})]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class Deterministic:
    t: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise InvalidArgument(f"threshold must be finite, got {self.t}")

    def cdf(self, x: np.ndarray | float) -> np.ndarray:
        return (np.asarray(x, dtype=float) >= self.t).astype(float)

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self.t, dtype=float)

    def support(self) -> tuple[float, ...]:
        return (self.t,)

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "deterministic", "t": self.t}


@dataclass(frozen=True)
class FiniteRandom:
    """``T = thresholds[i]`` with probability ``probs[i]``."""

    thresholds: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.thresholds)
        ps = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "thresholds", ts)
        object.__setattr__(self, "probs", ps)
        if not ts or len(ts) != len(ps):
            raise InvalidArgument("need the same nonzero number of thresholds and probabilities")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise InvalidArgument(f"thresholds must be strictly increasing: {ts}")
        if any(p < 0 for p in ps) or abs(math.fsum(ps) - 1.0) > 1e-12:
            raise InvalidArgument(f"probabilities must be nonnegative and sum to 1: {ps}")

    @property
    def m(self) -> int:
        return len(self.thresholds)

    def cdf(self, x: np.ndarray | float) -> np.ndarray:
        cum = np.concatenate([[0.0], np.cumsum(self.probs)])
        cum[-1] = 1.0
        idx = np.searchsorted(np.array(self.thresholds), np.asarray(x, dtype=float), side="right")
        return cum[idx]

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, np.asarray(u, dtype=float), side="left")
        return np.array(self.thresholds)[np.minimum(idx, self.m - 1)]

    def support(self) -> tuple[float, ...]:
        return self.thresholds

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "finite", "thresholds": list(self.thresholds), "probs": list(self.probs)}


@dataclass(frozen=True)
class UniformRandom:
    """``T`` uniform on ``(lo, hi)``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise InvalidArgument(f"uniform threshold needs finite lo < hi, got ({self.lo}, {self.hi})")

    def cdf(self, x: np.ndarray | float) -> np.ndarray:
        return np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * np.asarray(u, dtype=float)

    def support(self) -> tuple[float, ...]:
        return (self.lo, self.hi)

    def discretize(self, atoms: int = 200) -> FiniteRandom:
        """Equiprobable atoms at the midpoints of ``atoms`` equal cells."""
        mids = self.lo + (self.hi - self.lo) * (np.arange(atoms) + 0.5) / atoms
        return FiniteRandom(tuple(mids.tolist()), (1.0 / atoms,) * atoms)

    def to_spec(self) -> dict[str, Any]:
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


ThresholdPolicy = Union[Deterministic, FiniteRandom, UniformRandom]


def payoff_matrix(policy: ThresholdPolicy, values: np.ndarray) -> np.ndarray:
    """Exact expected payoff for each row of an ``(N, n)`` array of values."""
    v = np.atleast_2d(np.asarray(values, dtype=float))
    running = np.maximum.accumulate(v, axis=1)
    f_now = policy.cdf(running)
    f_before = np.concatenate([np.zeros((v.shape[0], 1)), f_now[:, :-1]], axis=1)
    return np.sum(v * (f_now - f_before), axis=1)


def payoff_on_tuple(policy: ThresholdPolicy, values) -> float:
    """Expected value collected by ``policy`` on the fixed sequence ``values``."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidArgument("values must be a nonempty 1-d sequence")
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise InvalidArgument("values must be finite and nonnegative")
    if isinstance(policy, Deterministic):
        hits = np.flatnonzero(v >= policy.t)
        return float(v[hits[0]]) if hits.size else 0.0
    return float(payoff_matrix(policy, v[None, :])[0])


def epsilon_grid_policy(p_star: float, n: int, eps: float) -> ThresholdPolicy:
    """``n`` equiprobable thresholds ``p* - (n-1) eps, ..., p* - eps, p*``."""
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    if eps < 0:
        raise InvalidArgument(f"eps must be nonnegative, got {eps}")
    if eps == 0 or n == 1:
        return Deterministic(float(p_star))
    lowest = p_star - (n - 1) * eps
    if lowest <= 0:
        raise InvalidArgument(f"lowest threshold p* - (n-1) eps = {lowest:.6g} is not positive")
    ts = tuple(p_star - (n - 1 - i) * eps for i in range(n))
    return FiniteRandom(ts, (1.0 / n,) * n)


def policy_from_spec(spec: dict[str, Any]) -> ThresholdPolicy:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidArgument(f"policy spec must be an object with a 'kind' key: {spec!r}")
    kind = str(spec["kind"]).lower()
    try:
        if kind == "deterministic":
            return Deterministic(float(spec["t"]))
        if kind == "finite":
            return FiniteRandom(tuple(spec["thresholds"]), tuple(spec["probs"]))
        if kind == "uniform":
            return UniformRandom(float(spec["lo"]), float(spec["hi"]))
    except KeyError as exc:
        raise InvalidArgument(f"policy spec for {kind!r} is missing {exc}") from None
    raise InvalidArgument(f"unknown policy kind {spec['kind']!r}")
