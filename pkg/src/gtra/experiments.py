"""Strategy comparison machinery shared by the CLI and the test gates.

For a game instance, every strategy is realized, played against the softmax
attacker response, and scored on defender/attacker utility plus the Monte
Carlo metric suite. Trial draws can be shared across strategies within an
instance so comparisons are paired.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .baselines import all_ones, average_strategy, ne_strategy, part_ones, rand_strategy
from .game import DefenseStrategy, GameInstance, attacker_utility, qr_attack_distribution, qr_defender_utility
from .metrics import consumed_resources, coverage, effectiveness, sample_outcomes, vulnerability
from .scenarios import ScenarioConfig, sample_instance
from .seeds import STREAM_TRIALS, derive_seed
from .solver import GaParams

STRATEGY_NAMES = ("NE", "PartOneS", "Rand", "Average", "AllOneS")

METRIC_COLUMNS = (
    "defender_utility",
    "attacker_utility",
    "vulnerability",
    "coverage",
    "effectiveness",
    "consumption",
)


@dataclass(frozen=True)
class StrategyOutcome:
    """Scores of one strategy on one instance."""

    strategy: str
    defender_utility: float
    attacker_utility: float
    vulnerability: float
    coverage: float
    effectiveness: float
    consumption: float
    feasible: bool

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


def realize_strategy(
    name: str,
    g: GameInstance,
    times: int = 10,
    ga: GaParams = GaParams(),
    sort_by_reward: bool = False,
) -> DefenseStrategy:
    if name == "NE":
        return ne_strategy(g, times=times, params=ga)
    if name == "PartOneS":
        return part_ones(g, sort_by_reward=sort_by_reward)
    if name == "Rand":
        return rand_strategy(g, g.seed)
    if name == "Average":
        return average_strategy(g)
    if name == "AllOneS":
        return all_ones(g)
    raise ValueError(f"unknown strategy {name!r}")


def evaluate_profile(
    g: GameInstance, name: str, strategy: DefenseStrategy, trials: int, stream_seed: int
) -> StrategyOutcome:
    """Score a realized profile: utilities plus sampled outcome metrics."""
    p = qr_attack_distribution(g, strategy)
    counts = sample_outcomes(g, p, strategy, trials, stream_seed)
    consumption = consumed_resources(g, strategy)
    feasible = strategy.budget_feasible
    if feasible is None:
        feasible = consumption <= g.budget + 1e-9
    return StrategyOutcome(
        strategy=name,
        defender_utility=qr_defender_utility(g, strategy),
        attacker_utility=attacker_utility(g, p, strategy),
        vulnerability=vulnerability(counts),
        coverage=coverage(counts),
        effectiveness=effectiveness(counts, consumption),
        consumption=consumption,
        feasible=bool(feasible),
    )


def compare_instance(
    g: GameInstance,
    trials: int = 10000,
    times: int = 10,
    ga: GaParams = GaParams(),
    shared_trial_draws: bool = True,
    strategies=STRATEGY_NAMES,
) -> list[StrategyOutcome]:
    """Evaluate all strategies on one instance, optionally with paired draws."""
    outcomes = []
    for idx, name in enumerate(strategies):
        q = realize_strategy(name, g, times=times, ga=ga)
        if shared_trial_draws:
            stream = derive_seed(g.seed, STREAM_TRIALS)
        else:
            stream = derive_seed(g.seed, STREAM_TRIALS, idx)
        outcomes.append(evaluate_profile(g, name, q, trials, stream))
    return outcomes


def compare_config(
    cfg: ScenarioConfig,
    trials: int = 10000,
    times: int = 10,
    ga: GaParams = GaParams(),
    shared_trial_draws: bool = True,
    threads: int = 1,
) -> list[list[StrategyOutcome]]:
    """Per-instance strategy outcomes for a whole scenario family.

    Instances evaluate independently (optionally on a thread pool); results
    are assembled in instance order, so the output does not depend on the
    worker count.
    """

    def one(index: int) -> list[StrategyOutcome]:
        g = sample_instance(cfg, index)
        return compare_instance(
            g, trials=trials, times=times, ga=ga, shared_trial_draws=shared_trial_draws
        )

    indices = range(cfg.instances)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, indices))
    return [one(i) for i in indices]


def mean_outcomes(rows: list[list[StrategyOutcome]]) -> dict[str, dict[str, float]]:
    """Per-strategy means of every metric over the instance axis."""
    means: dict[str, dict[str, float]] = {}
    if not rows:
        return means
    for pos, name in enumerate(r.strategy for r in rows[0]):
        per_metric = {}
        for metric in METRIC_COLUMNS:
            values = [inst[pos].metric(metric) for inst in rows]
            per_metric[metric] = sum(values) / len(values)
        means[name] = per_metric
    return means
