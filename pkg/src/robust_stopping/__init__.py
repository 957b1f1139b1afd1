"""Robust optimal stopping when only the law of the maximum offer is known."""

from .adversary import (
    WorstCaseInstance,
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
)
from .bounds import (
    BoundReport,
    beta_cutoff,
    bound_report,
    count_iterations,
    lower_bound_uniform,
    partition_bound,
    upper_bound_partition,
    upper_bound_universal,
    upper_envelope,
)
from .distributions import (
    Exponential,
    Frechet,
    MaxDistribution,
    PointMasses,
    Scaled,
    TruncatedPareto,
    frechet_base,
    from_spec,
)
from .monopoly import MonopolyResult, c_constant, revenue, solve_monopoly
from .policies import (
    Deterministic,
    FiniteRandom,
    UniformRandom,
    epsilon_grid_policy,
    payoff_on_tuple,
    policy_from_spec,
)
from .prophet import ProphetSolution, explicit_log_bound, solve_worst_ratio, worst_case_distribution
from .sim import SimConfig, SimResult, simulate_policy_vs_instance

__all__ = [name for name in dir() if not name.startswith("_")]
