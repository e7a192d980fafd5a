"""Budgeted security resource allocation with a quantal-response attacker.

The package models a defender who spreads a limited resource budget over many
targets while an attacker (perfectly rational or softmax-noisy) picks where
to strike. It provides the closed-form utilities, a restart-wrapped genetic
solver for the defender's equilibrium allocation, four baseline allocation
strategies, a Monte Carlo metric suite, single-target replicator dynamics,
and a reproducible CLI experiment harness.
"""

__version__ = "0.1.0"

from .baselines import all_ones, average_strategy, ne_strategy, part_ones, rand_strategy
from .dynamics import (
    SimplifiedPayoffs,
    Trajectory,
    integrate_trajectory,
    interior_equilibrium,
    phase_portrait,
    reduce_payoffs,
    replicator_field,
    rk4_step,
)
from .errors import CapacityError, ConfigError, DimensionError, GtraError, NumericError
from .game import (
    AttackStrategy,
    DefenseStrategy,
    GameInstance,
    TargetParams,
    attacker_utility,
    defender_utility,
    payoff_cell,
    per_target_attacker_utilities,
    per_target_attacker_utility,
    qr_attack_distribution,
    qr_defender_utility,
    qr_defender_utility_batch,
    rational_best_response,
)
from .metrics import (
    ExpectedOutcomes,
    OutcomeCounts,
    consumed_resources,
    coverage,
    effectiveness,
    expected_outcomes,
    growth_rate,
    sample_outcomes,
    vulnerability,
)
from .scenarios import Scenario, ScenarioConfig, SweepAxis, sample_instance, sweep_grid
from .seeds import derive_seed, rng_from
from .solver import GaParams, SolveResult, brute_force_solve, ga_optimize, iga_solve

__all__ = [
    "AttackStrategy",
    "CapacityError",
    "ConfigError",
    "DefenseStrategy",
    "DimensionError",
    "ExpectedOutcomes",
    "GaParams",
    "GameInstance",
    "GtraError",
    "NumericError",
    "OutcomeCounts",
    "Scenario",
    "ScenarioConfig",
    "SimplifiedPayoffs",
    "SolveResult",
    "SweepAxis",
    "TargetParams",
    "Trajectory",
    "all_ones",
    "attacker_utility",
    "average_strategy",
    "brute_force_solve",
    "consumed_resources",
    "coverage",
    "defender_utility",
    "derive_seed",
    "effectiveness",
    "expected_outcomes",
    "ga_optimize",
    "growth_rate",
    "iga_solve",
    "integrate_trajectory",
    "interior_equilibrium",
    "ne_strategy",
    "part_ones",
    "payoff_cell",
    "per_target_attacker_utilities",
    "per_target_attacker_utility",
    "phase_portrait",
    "qr_attack_distribution",
    "qr_defender_utility",
    "qr_defender_utility_batch",
    "rand_strategy",
    "rational_best_response",
    "reduce_payoffs",
    "replicator_field",
    "rk4_step",
    "rng_from",
    "sample_instance",
    "sample_outcomes",
    "sweep_grid",
    "vulnerability",
]
