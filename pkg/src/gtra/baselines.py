"""The four extreme allocation strategies plus the equilibrium wrapper.

Every strategy returns per-target protection probabilities labelled with
budget feasibility. Resource arithmetic uses the instance's budget weights
(defense costs, or ones under unit accounting).
"""

from __future__ import annotations

import numpy as np

from .game import DefenseStrategy, GameInstance
from .seeds import STREAM_RAND_BASELINE, rng_from
from .solver import GaParams, iga_solve

_FEAS_TOL = 1e-9


def part_ones(g: GameInstance, sort_by_reward: bool = False) -> DefenseStrategy:
    """Protect targets fully in order until the budget runs out.

    Walks targets in index order (or by descending attack reward when
    ``sort_by_reward``), assigning q = 1 while the budget covers the cost;
    the first target that does not fit gets the fractional remainder and all
    later ones get 0. Consumes exactly min(budget, total cost).
    """
    costs = g.resource_costs
    order = np.arange(g.n)
    if sort_by_reward:
        order = np.argsort(-g.rewards, kind="stable")
    q = np.zeros(g.n)
    remaining = g.budget
    for i in order:
        c = costs[i]
        if remaining >= c:
            q[i] = 1.0
            remaining -= c
        else:
            q[i] = remaining / c
            remaining = 0.0
            break
    return DefenseStrategy(q, budget_feasible=True)


def rand_strategy(g: GameInstance, stream_seed: int) -> DefenseStrategy:
    """Spread the budget across targets in random proportions.

    Draws r_i ~ U(0, 1) and sets q_i = r_i * budget / sum_j(r_j * cost_j),
    which spends the budget exactly; entries above one are clamped, so the
    realized consumption never exceeds the budget.
    """
    costs = g.resource_costs
    rng = rng_from(stream_seed, STREAM_RAND_BASELINE)
    draws = rng.random(g.n)
    while not draws.any():  # measure-zero guard
        draws = rng.random(g.n)
    q = np.clip(draws * g.budget / float(draws @ costs), 0.0, 1.0)
    return DefenseStrategy(q, budget_feasible=True)


def average_strategy(g: GameInstance) -> DefenseStrategy:
    """Split the budget equally: q_i = min(1, (budget/N) / cost_i)."""
    share = g.budget / g.n
    q = np.minimum(1.0, share / g.resource_costs)
    return DefenseStrategy(q, budget_feasible=True)


def all_ones(g: GameInstance) -> DefenseStrategy:
    """Protect everything, ignoring the budget; flagged infeasible when over."""
    consumption = float(g.resource_costs.sum())
    return DefenseStrategy(
        np.ones(g.n), budget_feasible=consumption <= g.budget + _FEAS_TOL
    )


def ne_strategy(
    g: GameInstance, times: int = 10, params: GaParams = GaParams()
) -> DefenseStrategy:
    """Equilibrium allocation: the restart-loop solver's best profile."""
    return iga_solve(g, times=times, params=params).q_star
