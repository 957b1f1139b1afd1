import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from robust_stopping.adversary import (
    brute_force_adversary,
    discretize,
    instance_against_deterministic,
    instance_against_finite_random,
    instance_against_uniform,
    instance_for_policy,
    min_payoff_finite_random,
    min_payoff_uniform,
    tilde_revenue,
    worst_tuple_uniform,
    _f1,
    _f2,
)
from robust_stopping.distributions import Exponential, PointMasses, frechet_base
from robust_stopping.errors import ArityMismatch, SearchTooLarge
from robust_stopping.monopoly import solve_monopoly
from robust_stopping.policies import (
    Deterministic,
    FiniteRandom,
    UniformRandom,
    epsilon_grid_policy,
    payoff_matrix,
    payoff_on_tuple,
)

EXP = Exponential()
TWO_POINT = PointMasses(((1.0, 0.5), (2.0, 0.5)))


def exhaustive_min(policy, n, v_max, grid):
    """Plain enumeration of increasing runs ending in v_max."""
    below = [g for g in grid if g < v_max]
    best = payoff_on_tuple(policy, [v_max] + [0.0] * (n - 1))
    for k in range(1, n):
        for run in itertools.combinations(below, k):
            seq = list(run) + [v_max] + [0.0] * (n - 1 - k)
            best = min(best, payoff_on_tuple(policy, seq))
    return best


def test_deterministic_instance():
    inst = instance_against_deterministic(1.0, 2)
    assert list(inst(2.0)) == [1.0, 2.0]
    assert list(instance_against_deterministic(1.0, 3)(0.5)) == [0.5, 0.0, 0.0]
    assert list(instance_against_deterministic(0.0, 2)(3.0)) == [0.0, 3.0]


def test_worst_tuple_uniform_cases():
    assert worst_tuple_uniform(0, 1, 2, 0.5) == pytest.approx((0.25, 0.5))
    assert worst_tuple_uniform(0, 1, 3, 0.1) == pytest.approx((1 / 30, 2 / 30, 0.1))
    assert worst_tuple_uniform(0, 1, 2, 5.0) == pytest.approx((1.0, 5.0))
    assert worst_tuple_uniform(1, 2, 3, 0.5) == pytest.approx((0.5, 0.0, 0.0))
    # the boundary maximum belongs to the equal-spacing case; both formulas agree there
    knee = 2 + 1 / 2
    assert worst_tuple_uniform(1, 2, 3, knee) == pytest.approx((1 + 1.5 / 3, 1 + 3 / 3, knee))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_worst_tuple_uniform_beats_every_grid_candidate(n):
    pol = UniformRandom(0.6, 1.4)
    grid = list(np.linspace(0.0, 3.0, 100 if n < 4 else 30))
    for v_max in [0.3, 0.7, 1.1, 1.4, 1.9, 2.8]:
        ours = payoff_on_tuple(pol, worst_tuple_uniform(0.6, 1.4, n, v_max))
        assert ours <= exhaustive_min(pol, n, v_max, grid) + 1e-12


def test_f1_f2_continuity():
    for n in (2, 3, 7):
        t1, t2 = 0.4, 1.3
        assert _f1(t1, t1, t2, n) == 0.0
        expected = t1 + (n + 1) * (t2 - t1) / (2 * n)
        assert _f1(t2, t1, t2, n) == pytest.approx(expected)
        assert _f2(t2, t1, t2, n) == pytest.approx(expected)


@pytest.mark.parametrize("d", [EXP, frechet_base()])
@pytest.mark.parametrize("n", [2, 3, 6])
def test_uniform_closed_form_against_quad_oracle(d, n):
    t1, t2 = 0.7, 1.2
    knee = t2 + (t2 - t1) / (n - 1)
    f1 = lambda s: (s - t1) / (t2 - t1) * (t1 + (n + 1) / (2 * n) * (s - t1))
    f2 = lambda s: s - (n - 1) / (2 * n) * (s - t1) ** 2 / (t2 - t1)
    ref = (
        integrate.quad(lambda s: f1(s) * d.density(s), t1, t2, epsabs=1e-14)[0]
        + integrate.quad(lambda s: f2(s) * d.density(s), t2, knee, epsabs=1e-14)[0]
        + f2(knee) * d.survival(knee)
    )
    assert min_payoff_uniform(d, t1, t2, n) == pytest.approx(ref, abs=1e-10)
    assert min_payoff_uniform(d, t1, t2, n) >= min_payoff_uniform(d, t1, t2, n, exact=False)


@given(st.floats(0.05, 2.0), st.floats(0.01, 1.5), st.integers(2, 12))
def test_exact_uniform_dominates_simple_bound(t1, width, n):
    t2 = t1 + width
    for d in (EXP, TWO_POINT):
        assert min_payoff_uniform(d, t1, t2, n, True) >= min_payoff_uniform(d, t1, t2, n, False) - 1e-12


def test_collapsed_atoms_recover_monopoly_revenue():
    m = solve_monopoly(EXP)
    pol = FiniteRandom((1.0 - 1e-9, 1.0), (0.5, 0.5))
    assert min_payoff_finite_random(EXP, pol, 2) == pytest.approx(m.pi_star, abs=1e-8)
    single = FiniteRandom((1.0,), (1.0,))
    # one value only: the policy just collects the maximum above the threshold
    assert min_payoff_finite_random(EXP, single, 1) == pytest.approx(EXP.partial_expectation(1.0))


def test_finite_random_closed_form_against_quad_oracle():
    pol = FiniteRandom((0.9, 1.0), (0.5, 0.5))
    gamma = 0.05
    ref = sum(p * t * math.exp(-t) for t, p in zip(pol.thresholds, pol.probs))
    ref += gamma * math.exp(-(1.0 + gamma / 0.5))
    ref += 0.5 * integrate.quad(lambda v: v * math.exp(-(v + 1.0)), 0, gamma / 0.5)[0]
    assert min_payoff_finite_random(EXP, pol, 2) == pytest.approx(ref, abs=1e-12)


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        min_payoff_finite_random(EXP, FiniteRandom((1.0, 2.0), (0.5, 0.5)), 3)
    with pytest.raises(ArityMismatch):
        instance_against_finite_random(FiniteRandom((1.0, 2.0), (0.5, 0.5)), 3)


@pytest.mark.parametrize(
    "pol",
    [FiniteRandom((0.8, 0.9, 1.0), (0.2, 0.3, 0.5)), FiniteRandom((0.5, 1.0, 2.0), (0.6, 0.3, 0.1))],
)
def test_finite_instance_realises_closed_form(pol):
    q = (np.arange(100_000) + 0.5) / 100_000
    vm = EXP.quantile_array(q)
    rows = instance_against_finite_random(pol, 3)(vm)
    assert np.all(rows.max(axis=1) == vm)
    assert payoff_matrix(pol, rows).mean() == pytest.approx(min_payoff_finite_random(EXP, pol, 3), abs=2e-5)


def test_finite_instance_is_pointwise_optimal():
    pol = FiniteRandom((0.8, 0.9, 1.0), (0.2, 0.3, 0.5))
    grid = list(pol.thresholds) + list(np.linspace(0, 3, 25))
    inst = instance_against_finite_random(pol, 3)
    for v_max in [0.5, 0.85, 0.95, 1.02, 1.3, 2.5]:
        assert payoff_on_tuple(pol, inst(v_max)) == pytest.approx(exhaustive_min(pol, 3, v_max, grid), abs=1e-12)


def test_uniform_instance_realises_closed_form():
    q = (np.arange(100_000) + 0.5) / 100_000
    vm = frechet_base().quantile_array(q)
    rows = instance_against_uniform(0.4, 0.65, 5)(vm)
    assert np.all(rows.max(axis=1) == vm)
    got = payoff_matrix(UniformRandom(0.4, 0.65), rows).mean()
    assert got == pytest.approx(min_payoff_uniform(frechet_base(), 0.4, 0.65, 5), abs=5e-5)


def test_instance_dispatch():
    assert instance_for_policy(Deterministic(1.0), 2).n == 2
    assert instance_for_policy(UniformRandom(0.5, 1.0), 4).n == 4


def test_tilde_revenue_drops_only_the_last_term():
    m = solve_monopoly(EXP)
    for n, eps in [(2, 0.1), (3, 0.05), (5, 0.02)]:
        pol = epsilon_grid_policy(m.p_star, n, eps)
        full = min_payoff_finite_random(EXP, pol, n)
        tilde = tilde_revenue(EXP, m.p_star, n, eps)
        third = 1.0 / n * integrate.quad(lambda v: v * EXP.density(v + m.p_star), 0, eps)[0]
        assert tilde <= full
        assert full - tilde == pytest.approx(third, abs=1e-10)
    assert tilde_revenue(EXP, m.p_star, 4, 0.0) == pytest.approx(m.pi_star)


def test_gamma_slack_never_hurts():
    base = min_payoff_finite_random(EXP, FiniteRandom((0.9, 1.0), (0.5, 0.5)), 2)
    wider = min_payoff_finite_random(EXP, FiniteRandom((0.9, 1.0), (0.5, 0.5)), 2)
    assert wider == base
    tight = FiniteRandom((0.95, 1.0), (0.5, 0.5))
    loose = FiniteRandom((0.95, 1.1), (0.5, 0.5))
    # gamma terms only: remove the threshold revenues and compare
    def gamma_part(pol):
        return min_payoff_finite_random(EXP, pol, 2) - sum(
            p * t * EXP.survival(t) for t, p in zip(pol.thresholds, pol.probs)
        )
    assert gamma_part(loose) >= gamma_part(tight)


def test_brute_force_dp_equals_plain_enumeration():
    pol = FiniteRandom((0.7, 1.0, 1.6), (0.3, 0.3, 0.4))
    grid = sorted(set(np.linspace(0, 2.5, 12).tolist()) | set(pol.thresholds))
    d_grid = [(0.5, 0.2), (0.9, 0.2), (1.3, 0.3), (2.4, 0.3)]
    for n in (2, 3, 4):
        plain = sum(w * exhaustive_min(pol, n, v, grid) for v, w in d_grid)
        assert brute_force_adversary(d_grid, pol, n, grid) == pytest.approx(plain, abs=1e-12)


def test_brute_force_against_deterministic_gives_revenue():
    m = solve_monopoly(EXP)
    grid = np.union1d(np.linspace(0, 10, 500), [m.p_star])
    d_grid = discretize(EXP, 2000)
    got = brute_force_adversary(d_grid, Deterministic(m.p_star), 2, grid)
    assert got == pytest.approx(m.pi_star, rel=1e-3)


def test_brute_force_limits():
    with pytest.raises(SearchTooLarge):
        brute_force_adversary([(1.0, 1.0)], Deterministic(1.0), 5, np.linspace(0, 1, 2000))


def test_discretize():
    assert discretize(TWO_POINT) == [(1.0, 0.5), (2.0, 0.5)]
    pts = discretize(EXP, 10)
    assert len(pts) == 10 and sum(w for _, w in pts) == pytest.approx(1.0)
