"""Worst-case prophet ratio when only the mean and variance of the maximum are known.

With ``t = 1/z`` the worst ratio ``z = Pi*/mu`` solves ``g(t) = 1 + cv2`` where
``g(t) = t^-2 (2 e^(t-1) - 1)``. ``g`` increases from ``g(1) = 1``, so the root
is found by bisection on ``log g``, which stays finite for large ``t``.
The extremal law is the equal-revenue distribution on ``[pi, k]`` with an
atom at ``k``.

``t`` as a function of ``x = log g`` is concave, so each tangent line gives a
closed-form lower bound ``z >= 1 / (c + beta * log(1 + cv2))`` where, at the
tangent point ``alpha``, ``beta = g(alpha) / g'(alpha)`` and
``c = alpha - beta * log g(alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import MaxDistribution, PointMasses, TruncatedPareto
from .errors import InvalidArgument
from .numerics import bisect_predicate

ALPHA_MAX = 40.0
ALPHA_POINTS = 10_000


def g(t: float) -> float:
    return (2.0 * math.exp(t - 1.0) - 1.0) / (t * t)


def log_g(t: float) -> float:
    """``log g(t)`` without overflow: ``(t - 1) + log(2 - e^(1-t)) - 2 log t``."""
    return (t - 1.0) + math.log(2.0 - math.exp(1.0 - t)) - 2.0 * math.log(t)


def ratio_residual(z: float, cv2: float) -> float:
    """``2 z^2 e^(1/z - 1) - z^2 - (1 + cv2)``."""
    return 2.0 * z * z * math.exp(1.0 / z - 1.0) - z * z - (1.0 + cv2)


def beta_of_alpha(alpha: float) -> float:
    """``g(alpha) / g'(alpha)``; decreases from +inf to 1 on ``alpha > 1``."""
    if not alpha > 1.0:
        raise InvalidArgument(f"alpha must exceed 1, got {alpha}")
    d = alpha - 1.0
    # (alpha - 2) e^d + 1, written to limit cancellation near alpha = 1
    h = (alpha - 2.0) * math.expm1(d) + d
    return alpha * (2.0 * math.exp(d) - 1.0) / (2.0 * h)


def alpha_of_beta(beta: float) -> float:
    if not beta > 1.0:
        raise InvalidArgument(f"beta must exceed 1, got {beta}")
    hi = 2.0
    while beta_of_alpha(hi) > beta:
        hi *= 2.0
        if hi > 1e6:
            raise InvalidArgument(f"beta={beta} is too close to 1 to invert")
    # beta_of_alpha is decreasing: find the first alpha where it drops to beta
    return bisect_predicate(lambda a: beta_of_alpha(a) <= beta, 1.0 + 1e-12, hi, rtol=1e-15)


def intercept(alpha: float) -> float:
    """``c(beta) = alpha - beta * log g(alpha)`` at ``beta = beta_of_alpha(alpha)``."""
    return alpha - beta_of_alpha(alpha) * log_g(alpha)


def explicit_bound_alpha(cv2: float, alpha: float) -> float:
    if cv2 < 0:
        raise InvalidArgument(f"cv2 must be nonnegative, got {cv2}")
    return 1.0 / (intercept(alpha) + beta_of_alpha(alpha) * math.log1p(cv2))


def explicit_log_bound(cv2: float, beta: float) -> float:
    """``1 / (c(beta) + beta log(1 + cv2))``, a lower bound on the worst ratio."""
    return explicit_bound_alpha(cv2, alpha_of_beta(beta))


def best_alpha(cv2: float, alphas: np.ndarray | None = None) -> tuple[float, float]:
    """Tangent point on the grid giving the largest explicit bound."""
    if alphas is None:
        alphas = np.linspace(1.0, ALPHA_MAX, ALPHA_POINTS + 1)[1:]
    vals = [explicit_bound_alpha(cv2, float(a)) for a in alphas]
    i = int(np.argmax(vals))
    return float(alphas[i]), vals[i]


def worst_ratio(cv2: float) -> float:
    """Root ``z`` of ``2 z^2 e^(1/z - 1) - z^2 = 1 + cv2`` in ``(0, 1]``."""
    if not cv2 >= 0 or not math.isfinite(cv2):
        raise InvalidArgument(f"cv2 must be finite and nonnegative, got {cv2}")
    if cv2 == 0:
        return 1.0
    target = math.log1p(cv2)
    hi = 2.0
    while log_g(hi) < target:
        hi *= 2.0
    t = bisect_predicate(lambda s: log_g(s) >= target, 1.0, hi, rtol=1e-16)
    # the two bracket ends differ by an ulp; keep the better one
    lo_t = math.nextafter(t, 1.0)
    z = min((1.0 / t, 1.0 / lo_t), key=lambda v: abs(ratio_residual(v, cv2)))
    return min(z, 1.0)


@dataclass(frozen=True)
class ProphetSolution:
    mu: float
    sigma2: float
    cv2: float
    z: float
    pi: float
    k_top: float
    explicit_bound: float
    beta_used: float
    alpha_used: float
    c_used: float
    residual: float


def solve_worst_ratio(mu: float, sigma2: float) -> ProphetSolution:
    if not mu > 0 or not math.isfinite(mu):
        raise InvalidArgument(f"mu must be positive and finite, got {mu}")
    if not sigma2 >= 0 or not math.isfinite(sigma2):
        raise InvalidArgument(f"sigma2 must be nonnegative and finite, got {sigma2}")
    cv2 = sigma2 / (mu * mu)
    z = worst_ratio(cv2)
    pi = z * mu
    k_top = pi * math.exp(mu / pi - 1.0)
    alpha, bound = best_alpha(cv2)
    beta = beta_of_alpha(alpha)
    return ProphetSolution(
        mu=mu,
        sigma2=sigma2,
        cv2=cv2,
        z=z,
        pi=pi,
        k_top=k_top,
        explicit_bound=bound,
        beta_used=beta,
        alpha_used=alpha,
        c_used=intercept(alpha),
        residual=ratio_residual(z, cv2),
    )


def worst_case_distribution(mu: float, sigma2: float) -> MaxDistribution:
    """Equal-revenue law on ``[pi, k]`` whose mean and variance are ``(mu, sigma2)``."""
    sol = solve_worst_ratio(mu, sigma2)
    if sol.k_top <= sol.pi:
        return PointMasses(((mu, 1.0),))
    return TruncatedPareto(sol.pi, sol.k_top)
