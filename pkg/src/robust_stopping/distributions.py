"""Distributions of the maximum offer value.

Every family exposes the same surface: CDF (right-continuous), its left
limit, survival ``P(X >= t)``, the density of the absolutely continuous
part, atoms, derivatives of the CDF up to third order, quantiles, moments
and partial expectations ``E[X; a <= X <= b]``.

All families are immutable. ``support_lo`` is 0 for every built-in family
so that partition constructions can start from the origin.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from scipy import special

from .errors import DivergentMean, InvalidArgument, UnsupportedForDiscrete
from .numerics import central_difference, integrate_pieces

TAIL_LEVEL = 1.0 - 1e-12
QUAD_TOL = 1e-10
_BREAK_LEVELS = (0.5,) + tuple(1.0 - 10.0**-j for j in range(1, 12))


def _check_t(t: float) -> float:
    t = float(t)
    if t < 0 or math.isnan(t):
        raise InvalidArgument(f"expected t >= 0, got {t}")
    return t


class MaxDistribution:
    """Common machinery; concrete families override the primitives."""

    support_lo: float = 0.0
    has_density: bool = True

    # --- primitives each family provides -------------------------------
    @property
    def support_hi(self) -> float:
        return math.inf

    def cdf(self, t: float) -> float:
        raise NotImplementedError

    def cdf_left(self, t: float) -> float:
        """Left limit ``F(t-)``; equals ``cdf`` unless ``t`` is an atom."""
        return self.cdf(t)

    def density(self, t: float) -> float:
        """Density of the absolutely continuous part (0 where there is none)."""
        return 0.0

    def atoms(self) -> tuple[tuple[float, float], ...]:
        return ()

    def breakpoints(self) -> tuple[float, ...]:
        """Points where the density is not smooth."""
        return ()

    def _derivative(self, t: float, order: int) -> float:
        raise NotImplementedError

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def second_moment(self) -> float:
        raise NotImplementedError

    def _continuous_tail(self, x: float) -> float | None:
        """Closed form of the continuous-part integral of t dF over (x, inf)."""
        return None

    def _closed_partial(self, a: float, b: float) -> float | None:
        return None

    # --- derived quantities --------------------------------------------
    @property
    def is_continuous(self) -> bool:
        return not self.atoms()

    @property
    def has_finite_mean(self) -> bool:
        try:
            return math.isfinite(self.mean)
        except DivergentMean:
            return False

    @property
    def variance(self) -> float:
        m = self.mean
        return self.second_moment - m * m

    def survival(self, t: float) -> float:
        """``P(X >= t)``, using the left limit so atoms at ``t`` count."""
        t = _check_t(t)
        if t <= self.support_lo:
            return 1.0
        return 1.0 - self.cdf_left(t)

    def derivative(self, t: float, order: int, method: str = "analytic") -> float:
        """``order``-th derivative of the CDF at ``t`` (order 1, 2 or 3)."""
        if order not in (1, 2, 3):
            raise InvalidArgument(f"derivative order must be 1, 2 or 3, got {order}")
        if not self.has_density:
            raise UnsupportedForDiscrete(f"{type(self).__name__} has no derivatives")
        if method == "analytic":
            return self._derivative(float(t), order)
        if method == "fd":
            return self.derivative_fd(t, order)
        raise InvalidArgument(f"unknown derivative method {method!r}")

    def derivative_fd(self, t: float, order: int) -> float:
        """Central finite differences, differencing the density when possible."""
        if not self.has_density:
            raise UnsupportedForDiscrete(f"{type(self).__name__} has no derivatives")
        t = float(t)
        h = max(1e-5, 1e-5 * t)
        if order == 1:
            return central_difference(self.cdf, t, 1, h)
        return central_difference(self.density, t, order - 1, h)

    def quantile(self, q: float) -> float:
        """Generalised inverse ``inf{t : F(t) >= q}`` for ``0 < q < 1``."""
        q = float(q)
        if not 0.0 < q < 1.0:
            raise InvalidArgument(f"quantile level must lie in (0, 1), got {q}")
        return float(self.quantile_array(np.array([q]))[0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.quantile_array(rng.random(size))

    def upper_quantile(self) -> float:
        """Effective right end used for truncating infinite integrals."""
        if math.isfinite(self.support_hi):
            return self.support_hi
        return self.quantile(TAIL_LEVEL)

    def expect(
        self,
        g: Callable[[float], float],
        lo: float,
        hi: float,
        *,
        include_lo: bool = True,
        include_hi: bool = True,
        breakpoints: Iterable[float] = (),
        tol: float = QUAD_TOL,
    ) -> float:
        """``E[g(X); X in <lo, hi>]`` over a finite interval.

        The continuous part is integrated with adaptive Simpson, split at the
        family's own breakpoints and at ``breakpoints``. Atoms strictly inside
        are added; atoms at the ends only when the end is included.
        """
        if hi < lo:
            raise InvalidArgument(f"empty interval [{lo}, {hi}]")
        if not math.isfinite(hi):
            raise InvalidArgument("expect() needs a finite upper limit")
        total = 0.0
        if self.has_density and hi > lo:
            a = max(lo, self.support_lo)
            b = min(hi, self.support_hi)
            if b > a:
                pts = [a, b]
                pts += [p for p in self.breakpoints() if a < p < b]
                pts += [p for p in breakpoints if a < p < b]
                total += integrate_pieces(lambda t: g(t) * self.density(t), pts, tol)
        for x, m in self.atoms():
            inside = lo < x < hi or (include_lo and x == lo) or (include_hi and x == hi)
            if inside:
                total += g(x) * m
        return total

    def partial_expectation(self, a: float, b: float = math.inf, method: str = "auto") -> float:
        """``E[X; a <= X <= b]``, atoms at both ends included.

        ``method="auto"`` uses a closed form when the family has one,
        ``"quadrature"`` forces numerical integration (truncated at the
        ``1 - 1e-12`` quantile, plus a closed-form tail where available).
        """
        a, b = float(a), float(b)
        if b < a:
            raise InvalidArgument(f"partial_expectation needs a <= b, got [{a}, {b}]")
        if not math.isfinite(b) and not self.has_finite_mean:
            raise DivergentMean(f"{self!r} has an infinite tail expectation")
        if method == "auto":
            closed = self._closed_partial(a, b)
            if closed is not None:
                return closed
        elif method != "quadrature":
            raise InvalidArgument(f"unknown method {method!r}")
        return self._quadrature_partial(a, b)

    def _quadrature_partial(self, a: float, b: float) -> float:
        hi = b
        tail = 0.0
        if not math.isfinite(b):
            hi = self.upper_quantile()
            if not math.isfinite(self.support_hi):
                t = self._continuous_tail(max(hi, a))
                tail = t if t is not None else 0.0
            if a >= hi:
                atoms = sum(x * m for x, m in self.atoms() if x >= a)
                return tail + atoms
        breaks = []
        if self.has_density:
            for lvl in _BREAK_LEVELS:
                x = self.quantile(lvl)
                if a < x < hi:
                    breaks.append(x)
        return self.expect(lambda t: t, a, hi, breakpoints=breaks) + tail

    def to_spec(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(MaxDistribution):
    rate: float = 1.0

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise InvalidArgument(f"rate must be positive, got {self.rate}")

    def cdf(self, t: float) -> float:
        return -math.expm1(-self.rate * t) if t > 0 else 0.0

    def density(self, t: float) -> float:
        return self.rate * math.exp(-self.rate * t) if t >= 0 else 0.0

    def _derivative(self, t: float, order: int) -> float:
        if t < 0:
            return 0.0
        return (-1) ** (order + 1) * self.rate**order * math.exp(-self.rate * t)

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        return -np.log1p(-np.asarray(q, dtype=float)) / self.rate

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def second_moment(self) -> float:
        return 2.0 / self.rate**2

    def _continuous_tail(self, x: float) -> float:
        x = max(x, 0.0)
        return (x + 1.0 / self.rate) * math.exp(-self.rate * x)

    def _closed_partial(self, a: float, b: float) -> float:
        upper = self._continuous_tail(b) if math.isfinite(b) else 0.0
        return self._continuous_tail(a) - upper

    def to_spec(self) -> dict[str, Any]:
        return {"family": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Frechet(MaxDistribution):
    """``F(x) = exp(-(x/scale)^(-shape))`` on ``x > 0``."""

    shape: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not (self.shape > 0 and self.scale > 0):
            raise InvalidArgument("Frechet shape and scale must be positive")

    def _u(self, t: float) -> float:
        r = t / self.scale
        if r <= 0:
            return math.inf
        lu = -self.shape * math.log(r)
        return math.exp(lu) if lu < 700 else math.inf

    def cdf(self, t: float) -> float:
        if t <= 0:
            return 0.0
        return math.exp(-self._u(t))

    def density(self, t: float) -> float:
        return self._derivative(t, 1)

    def _derivative(self, t: float, order: int) -> float:
        if t <= 0:
            return 0.0
        u = self._u(t)
        if u > 700:
            return 0.0
        g = self.shape
        if order == 1:
            poly = g * u
        elif order == 2:
            poly = g * g * u * u - (g * g + g) * u
        else:
            poly = g**3 * u**3 - (3 * g**3 + 3 * g * g) * u * u + (g**3 + 3 * g * g + 2 * g) * u
        return math.exp(-u) * poly / t**order

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        with np.errstate(divide="ignore"):
            return self.scale * (-np.log(q)) ** (-1.0 / self.shape)

    @property
    def mean(self) -> float:
        if self.shape <= 1:
            raise DivergentMean(f"Frechet with shape {self.shape} <= 1 has infinite mean")
        return self.scale * math.gamma(1.0 - 1.0 / self.shape)

    @property
    def second_moment(self) -> float:
        if self.shape <= 2:
            return math.inf
        return self.scale**2 * math.gamma(1.0 - 2.0 / self.shape)

    def _continuous_tail(self, x: float) -> float:
        if x <= 0:
            return self.mean
        a = 1.0 - 1.0 / self.shape
        u = self._u(x)
        if math.isinf(u):
            return self.mean
        return self.scale * math.gamma(a) * float(special.gammainc(a, u))

    def _closed_partial(self, a: float, b: float) -> float:
        if math.isfinite(b):
            if self.shape <= 1:
                return None  # no finite closed form; quadrature handles bounded b
            return self._continuous_tail(a) - self._continuous_tail(b)
        return self._continuous_tail(a)

    def to_spec(self) -> dict[str, Any]:
        return {"family": "frechet", "shape": self.shape, "scale": self.scale}


@dataclass(frozen=True)
class PointMasses(MaxDistribution):
    """Finitely many atoms ``(value, probability)``."""

    points: tuple[tuple[float, float], ...]
    has_density = False

    def __post_init__(self) -> None:
        pts = tuple((float(x), float(p)) for x, p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise InvalidArgument("PointMasses needs at least one atom")
        xs = [x for x, _ in pts]
        ps = [p for _, p in pts]
        if any(x < 0 for x in xs):
            raise InvalidArgument("atom values must be nonnegative")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidArgument("atom values must be strictly increasing")
        if any(p <= 0 for p in ps):
            raise InvalidArgument("atom probabilities must be positive")
        if abs(math.fsum(ps) - 1.0) > 1e-12:
            raise InvalidArgument(f"atom probabilities sum to {math.fsum(ps)}, not 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([x for x, _ in self.points])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.points])

    @property
    def support_hi(self) -> float:
        return self.points[-1][0]

    def cdf(self, t: float) -> float:
        return min(1.0, math.fsum(p for x, p in self.points if x <= t))

    def cdf_left(self, t: float) -> float:
        return min(1.0, math.fsum(p for x, p in self.points if x < t))

    def survival(self, t: float) -> float:
        t = _check_t(t)
        return min(1.0, math.fsum(p for x, p in self.points if x >= t))

    def atoms(self) -> tuple[tuple[float, float], ...]:
        return self.points

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, np.asarray(q, dtype=float), side="left")
        return self.values[np.minimum(idx, len(cum) - 1)]

    @property
    def mean(self) -> float:
        return math.fsum(x * p for x, p in self.points)

    @property
    def second_moment(self) -> float:
        return math.fsum(x * x * p for x, p in self.points)

    def _closed_partial(self, a: float, b: float) -> float:
        return math.fsum(x * p for x, p in self.points if a <= x <= b)

    def to_spec(self) -> dict[str, Any]:
        return {"family": "pointmasses", "atoms": [list(pt) for pt in self.points]}


@dataclass(frozen=True)
class TruncatedPareto(MaxDistribution):
    """Equal-revenue law: ``F(x) = 1 - pi/x`` on ``(pi, k)`` with an atom
    of mass ``pi/k`` at ``k``. Every price in ``[pi, k]`` earns revenue ``pi``.
    """

    pi: float
    k: float

    def __post_init__(self) -> None:
        if not self.pi > 0:
            raise InvalidArgument(f"pi must be positive, got {self.pi}")
        if self.k < self.pi:
            raise InvalidArgument(f"k={self.k} must be >= pi={self.pi}")

    @property
    def support_hi(self) -> float:
        return self.k

    def cdf(self, t: float) -> float:
        if t < self.pi:
            return 0.0
        if t >= self.k:
            return 1.0
        return 1.0 - self.pi / t

    def cdf_left(self, t: float) -> float:
        if t <= self.pi:
            return 0.0
        if t > self.k:
            return 1.0
        return 1.0 - self.pi / t

    def density(self, t: float) -> float:
        return self.pi / (t * t) if self.pi < t < self.k else 0.0

    def _derivative(self, t: float, order: int) -> float:
        if not self.pi <= t < self.k:
            return 0.0
        return (-1) ** (order + 1) * math.factorial(order) * self.pi / t ** (order + 1)

    def atoms(self) -> tuple[tuple[float, float], ...]:
        return ((self.k, self.pi / self.k),)

    def breakpoints(self) -> tuple[float, ...]:
        return (self.pi, self.k)

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        cont = q < 1.0 - self.pi / self.k
        out = np.full(q.shape, self.k)
        out[cont] = self.pi / (1.0 - q[cont])
        return out

    @property
    def mean(self) -> float:
        return self.pi + self.pi * math.log(self.k / self.pi)

    @property
    def second_moment(self) -> float:
        return 2.0 * self.pi * self.k - self.pi**2

    def _closed_partial(self, a: float, b: float) -> float:
        lo, hi = max(a, self.pi), min(b, self.k)
        total = self.pi * math.log(hi / lo) if hi > lo else 0.0
        if a <= self.k <= b:
            total += self.pi
        return total

    def to_spec(self) -> dict[str, Any]:
        return {"family": "truncated_pareto", "pi": self.pi, "k": self.k}


@dataclass(frozen=True)
class Scaled(MaxDistribution):
    """Law of ``factor * X`` for ``X ~ base``."""

    base: MaxDistribution
    factor: float

    def __post_init__(self) -> None:
        if not self.factor > 0:
            raise InvalidArgument(f"scale factor must be positive, got {self.factor}")

    @property
    def has_density(self) -> bool:  # type: ignore[override]
        return self.base.has_density

    @property
    def support_hi(self) -> float:
        return self.factor * self.base.support_hi

    def cdf(self, t: float) -> float:
        return self.base.cdf(t / self.factor)

    def cdf_left(self, t: float) -> float:
        return self.base.cdf_left(t / self.factor)

    def survival(self, t: float) -> float:
        return self.base.survival(_check_t(t) / self.factor)

    def density(self, t: float) -> float:
        return self.base.density(t / self.factor) / self.factor

    def _derivative(self, t: float, order: int) -> float:
        return self.base._derivative(t / self.factor, order) / self.factor**order

    def atoms(self) -> tuple[tuple[float, float], ...]:
        return tuple((self.factor * x, m) for x, m in self.base.atoms())

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(self.factor * x for x in self.base.breakpoints())

    def quantile_array(self, q: np.ndarray) -> np.ndarray:
        return self.factor * self.base.quantile_array(q)

    @property
    def mean(self) -> float:
        return self.factor * self.base.mean

    @property
    def second_moment(self) -> float:
        return self.factor**2 * self.base.second_moment

    def _continuous_tail(self, x: float) -> float | None:
        t = self.base._continuous_tail(x / self.factor)
        return None if t is None else self.factor * t

    def partial_expectation(self, a: float, b: float = math.inf, method: str = "auto") -> float:
        if b < a:
            raise InvalidArgument(f"partial_expectation needs a <= b, got [{a}, {b}]")
        return self.factor * self.base.partial_expectation(a / self.factor, b / self.factor, method)

    def to_spec(self) -> dict[str, Any]:
        return {"family": "scaled", "base": self.base.to_spec(), "factor": self.factor}


def frechet_base() -> Frechet:
    """Frechet law with mean ~1 and variance ~3 used in the worked example."""
    return Frechet(shape=2.197, scale=0.613)


def from_spec(spec: dict[str, Any]) -> MaxDistribution:
    """Build a distribution from a JSON-style dict.

    >>> from_spec({"family": "frechet", "shape": 2.197, "scale": 0.613})
    Frechet(shape=2.197, scale=0.613)
    """
    if not isinstance(spec, dict) or "family" not in spec:
        raise InvalidArgument(f"distribution spec must be an object with a 'family' key: {spec!r}")
    fam = str(spec["family"]).lower().replace("-", "_")
    try:
        if fam in ("exponential", "exp"):
            return Exponential(float(spec.get("rate", 1.0)))
        if fam == "frechet":
            return Frechet(float(spec["shape"]), float(spec.get("scale", 1.0)))
        if fam in ("pointmasses", "point_masses", "discrete"):
            return PointMasses(tuple((float(x), float(p)) for x, p in spec["atoms"]))
        if fam in ("truncated_pareto", "truncatedpareto", "equal_revenue"):
            return TruncatedPareto(float(spec["pi"]), float(spec["k"]))
        if fam == "scaled":
            return Scaled(from_spec(spec["base"]), float(spec["factor"]))
    except KeyError as exc:
        raise InvalidArgument(f"distribution spec for {fam!r} is missing {exc}") from None
    raise InvalidArgument(f"unknown distribution family {spec['family']!r}")


def load_spec(text_or_path: str) -> MaxDistribution:
    """Parse ``--dist`` input: inline JSON or a path to a JSON file."""
    path = Path(text_or_path)
    text = path.read_text() if not text_or_path.lstrip().startswith("{") and path.exists() else text_or_path
    return from_spec(json.loads(text))

