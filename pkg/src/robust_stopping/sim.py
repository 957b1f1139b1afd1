"""Monte Carlo check of worst-case payoffs.

Each sample draws ``v_max`` from the law by inverse CDF, expands it into the
adversarial sequence, draws the threshold by inverse CDF and records the
first value that clears it.

Randomness: numpy's PCG64 bit generator. Samples are cut into fixed-size
shards; shard ``j`` is seeded with ``SeedSequence([seed, j])`` and shard
statistics are merged in shard order, so results do not depend on how many
workers run the shards.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adversary import WorstCaseInstance
from .distributions import MaxDistribution
from .errors import InvalidArgument
from .policies import ThresholdPolicy

SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    samples: int = 1_000_000
    seed: int = 0
    antithetic: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise InvalidArgument(f"samples must be at least 1, got {self.samples}")
        if self.antithetic and self.samples % 2:
            raise InvalidArgument("antithetic sampling needs an even sample count")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise InvalidArgument(f"workers must be at least 1, got {self.workers}")


@dataclass(frozen=True)
class SimResult:
    mean_payoff: float
    std_error: float
    samples: int


def _first_crossing(values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    hit = values >= thresholds[:, None]
    first = np.argmax(hit, axis=1)
    got = values[np.arange(values.shape[0]), first]
    return np.where(hit.any(axis=1), got, 0.0)


def _shard_stats(
    d: MaxDistribution,
    instance: WorstCaseInstance,
    policy: ThresholdPolicy,
    seed: int,
    shard: int,
    size: int,
    antithetic: bool,
) -> tuple[int, float, float]:
    """``(count, mean, M2)`` of the shard's observations.

    Under antithetic sampling an observation is the mean of a mirrored pair.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, shard])))
    m = size // 2 if antithetic else size
    u = rng.random(m)
    w = rng.random(m)
    if antithetic:
        u = np.concatenate([u, 1.0 - u])
        w = np.concatenate([w, 1.0 - w])
    v_max = d.quantile_array(u)
    values = instance(v_max)
    pay = _first_crossing(values, policy.quantile_array(w))
    obs = 0.5 * (pay[:m] + pay[m:]) if antithetic else pay
    mean = float(np.mean(obs))
    return m, mean, float(np.sum((obs - mean) ** 2))


def _merge(a: tuple[int, float, float], b: tuple[int, float, float]) -> tuple[int, float, float]:
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def simulate_policy_vs_instance(
    d: MaxDistribution,
    instance: WorstCaseInstance,
    policy: ThresholdPolicy,
    cfg: SimConfig,
) -> SimResult:
    sizes = [SHARD_SIZE] * (cfg.samples // SHARD_SIZE)
    if cfg.samples % SHARD_SIZE:
        sizes.append(cfg.samples % SHARD_SIZE)

    def run(j: int) -> tuple[int, float, float]:
        return _shard_stats(d, instance, policy, cfg.seed, j, sizes[j], cfg.antithetic)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(j) for j in range(len(sizes))]

    acc = parts[0]
    for part in parts[1:]:
        acc = _merge(acc, part)
    count, mean, m2 = acc
    se = math.sqrt(m2 / (count - 1) / count) if count > 1 else math.inf
    return SimResult(mean, se, cfg.samples)
