"""Seeded generation of random game instances for the experiment families.

Five scenario families are supported. Four vary the cost relationship under
rewards and penalty magnitudes drawn uniformly from [1, 10] with budget
``gamma * n``:

    CmGreater   defense cost in (gamma, 2*gamma), attack cost in (0, gamma)
    CaGreater   defense cost in (0, gamma), attack cost in (gamma, 2*gamma)
    Equal       one cost draw in (0, gamma) used for both sides
    NoCost      both action costs zero; budget accounting switches to one
                unit per probability point (sum(q) <= budget)

The fifth, HighSec, models a hardened deployment where values dwarf costs:
defense cost in [0.01, 0.02], attack cost in [0.02, 0.03], attack penalty in
[1.4, 1.6], attack reward in [0.9, 1.1], and a defense penalty in [0.4, 0.6]
that is recorded on the target but consumed by no formula.

All draws derive deterministically from (master_seed, instance index).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ConfigError
from .game import GameInstance, TargetParams
from .seeds import (
    STREAM_INSTANCE_DRAWS,
    STREAM_INSTANCE_SEED,
    STREAM_SWEEP,
    derive_seed,
    rng_from,
)

DEFAULT_GAMMA = 0.1


class Scenario(str, Enum):
    CM_GREATER = "CmGreater"
    CA_GREATER = "CaGreater"
    EQUAL = "Equal"
    NO_COST = "NoCost"
    HIGH_SEC = "HighSec"


class SweepAxis(str, Enum):
    N = "N"
    GAMMA = "gamma"
    ALPHA = "alpha"
    LAMBDA = "lambda"
    BUDGET_FRACTION = "budget_fraction"


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment family: scenario, size, parameters, and seeding.

    ``budget_fraction`` overrides the default budget ``gamma * n`` with the
    given fraction of the maximum resources the instance could ever require
    (the total of its budget weights).
    """

    scenario: Scenario
    n: int
    gamma: float = DEFAULT_GAMMA
    alpha: float = 0.8
    lam: float = 1.5
    instances: int = 20
    master_seed: int = 0
    budget_fraction: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(
                f"gamma must satisfy 0 < gamma <= 1 (resources stay below the "
                f"target count), got {self.gamma}"
            )
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.instances < 1:
            raise ConfigError(f"instances must be >= 1, got {self.instances}")
        if self.budget_fraction is not None and not 0.0 <= self.budget_fraction <= 1.0:
            raise ConfigError(
                f"budget_fraction must lie in [0, 1], got {self.budget_fraction}"
            )


def sample_instance(cfg: ScenarioConfig, index: int) -> GameInstance:
    """Draw instance ``index`` of the family; deterministic per (seed, index).

    Draw order is fixed: rewards, penalties, then the scenario's cost draws
    (HighSec appends the unused defense penalties last).
    """
    if not 0 <= index < cfg.instances:
        raise ConfigError(f"index {index} outside 0..{cfg.instances - 1}")
    rng = rng_from(cfg.master_seed, STREAM_INSTANCE_DRAWS, index)
    n, gamma = cfg.n, cfg.gamma
    defense_penalty = [None] * n
    unit_resources = False

    if cfg.scenario is Scenario.HIGH_SEC:
        rewards = rng.uniform(0.9, 1.1, n)
        penalties = rng.uniform(1.4, 1.6, n)
        cm = rng.uniform(0.01, 0.02, n)
        ca = rng.uniform(0.02, 0.03, n)
        defense_penalty = rng.uniform(0.4, 0.6, n).tolist()
    else:
        rewards = rng.uniform(1.0, 10.0, n)
        penalties = rng.uniform(1.0, 10.0, n)
        if cfg.scenario is Scenario.CM_GREATER:
            cm = rng.uniform(gamma, 2 * gamma, n)
            ca = rng.uniform(0.0, gamma, n)
        elif cfg.scenario is Scenario.CA_GREATER:
            cm = rng.uniform(0.0, gamma, n)
            ca = rng.uniform(gamma, 2 * gamma, n)
        elif cfg.scenario is Scenario.EQUAL:
            cm = rng.uniform(0.0, gamma, n)
            ca = cm.copy()
        elif cfg.scenario is Scenario.NO_COST:
            cm = np.zeros(n)
            ca = np.zeros(n)
            unit_resources = True
        else:  # pragma: no cover - enum is closed
            raise ConfigError(f"unknown scenario {cfg.scenario!r}")

    targets = tuple(
        TargetParams(
            id=i + 1,
            attack_reward=float(rewards[i]),
            attack_penalty=float(penalties[i]),
            defense_cost=float(cm[i]),
            attack_cost=float(ca[i]),
            defense_penalty=None if defense_penalty[i] is None else float(defense_penalty[i]),
        )
        for i in range(n)
    )
    weights = np.ones(n) if unit_resources else cm
    if cfg.budget_fraction is not None:
        budget = cfg.budget_fraction * float(weights.sum())
    else:
        budget = gamma * n
    return GameInstance(
        targets=targets,
        budget=budget,
        alpha=cfg.alpha,
        lam=cfg.lam,
        seed=derive_seed(cfg.master_seed, STREAM_INSTANCE_SEED, index),
        unit_resources=unit_resources,
    )


_AXIS_TAGS = {axis: i for i, axis in enumerate(SweepAxis)}


def _validated_axis_value(axis: SweepAxis, value: float) -> dict:
    if axis is SweepAxis.N:
        if value < 1 or value != int(value):
            raise ConfigError(f"N values must be positive integers, got {value}")
        return {"n": int(value)}
    if axis is SweepAxis.GAMMA:
        if not 0.0 < value <= 1.0:
            raise ConfigError(f"gamma values must lie in (0, 1], got {value}")
        return {"gamma": float(value)}
    if axis is SweepAxis.ALPHA:
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"alpha values must lie in [0, 1], got {value}")
        return {"alpha": float(value)}
    if axis is SweepAxis.LAMBDA:
        if value < 0:
            raise ConfigError(f"lambda values must be >= 0, got {value}")
        return {"lam": float(value)}
    if axis is SweepAxis.BUDGET_FRACTION:
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"budget_fraction values must lie in [0, 1], got {value}")
        return {"budget_fraction": float(value)}
    raise ConfigError(f"unknown sweep axis {axis!r}")  # pragma: no cover


def sweep_grid(
    base: ScenarioConfig, axis: SweepAxis | str, values
) -> list[ScenarioConfig]:
    """One config per grid value, other fields copied, seeds re-derived."""
    axis = SweepAxis(axis)
    values = list(values)
    if not values:
        raise ConfigError("sweep values must be non-empty")
    configs = []
    for k, value in enumerate(values):
        overrides = _validated_axis_value(axis, float(value))
        overrides["master_seed"] = derive_seed(
            base.master_seed, STREAM_SWEEP, _AXIS_TAGS[axis], k
        )
        configs.append(replace(base, **overrides))
    return configs
