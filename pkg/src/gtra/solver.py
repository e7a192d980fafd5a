"""Defender strategy optimization.

The defender maximizes the softmax-response utility over protection profiles
q in [0,1]^N subject to the budget constraint sum(q_i * cost_i) <= budget.
The objective is nonlinear (the attacker distribution shifts with q), so the
search is a real-coded genetic algorithm wrapped in a restart loop that keeps
the best profile found, plus an exhaustive grid oracle for small instances.

Budget handling is by repair, not penalty: any profile over budget is scaled
down uniformly, so fitness values are always true objective values and remain
directly comparable to the oracle's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .game import DefenseStrategy, GameInstance, qr_defender_utility_batch
from .seeds import STREAM_GA_RESTART, derive_seed

_FEAS_TOL = 1e-9
_STALL_EPS = 1e-9
#: Exhaustive grids larger than this are refused.
_MAX_GRID_POINTS = 2e7
_GRID_CHUNK = 65536


@dataclass(frozen=True)
class GaParams:
    """Knobs of the real-coded genetic algorithm.

    ``mutation_rate=None`` means one expected mutation per genome (1/N per
    gene). ``mutation_scale`` is the Gaussian sigma as a fraction of the unit
    gene range. The run stops early after ``stall_generations`` generations
    without measurable improvement.
    """

    population_size: int = 200
    generations: int = 300
    crossover_rate: float = 0.9
    mutation_rate: float | None = None
    mutation_scale: float = 0.1
    elitism_count: int = 2
    stall_generations: int = 50
    tournament_size: int = 3
    blend_alpha: float = 0.5

    def __post_init__(self) -> None:
        if self.population_size < 1 or self.generations < 1:
            raise ValueError("population_size and generations must be >= 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.mutation_scale <= 0:
            raise ValueError("mutation_scale must be > 0")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must satisfy 0 <= elitism < population")
        if self.stall_generations < 1 or self.tournament_size < 1:
            raise ValueError("stall_generations and tournament_size must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    """Best profile found, its utility, and per-iteration bookkeeping.

    ``per_iteration_utilities`` holds the best-so-far utility per generation
    for a single GA run, and the per-restart utilities for the restart loop;
    in both cases the returned ``utility`` is its maximum.
    """

    q_star: DefenseStrategy
    utility: float
    iterations_used: int
    per_iteration_utilities: tuple[float, ...]
    seed: int


def repair_budget(profiles: np.ndarray, costs: np.ndarray, budget: float) -> np.ndarray:
    """Scale over-budget rows down by budget/consumption (in place, returned).

    The scale factor is < 1 whenever it is applied, so repaired genes stay
    inside [0, 1].
    """
    consumption = profiles @ costs
    over = consumption > budget
    if over.any():
        scale = np.where(over, budget / np.where(over, consumption, 1.0), 1.0)
        profiles *= scale[:, None]
    return profiles


def _initial_population(
    g: GameInstance, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Half uniform, half sparse individuals, all repaired to the budget.

    Sparse individuals switch each gene on with probability
    min(1, budget / total_cost): tight budgets have near-sparse optima and a
    purely uniform start would sit deep in infeasibility.
    """
    costs = g.resource_costs
    half = size // 2
    uniform = rng.random((half, g.n))
    p_on = min(1.0, g.budget / float(costs.sum()))
    sparse = rng.random((size - half, g.n))
    sparse *= rng.random((size - half, g.n)) < p_on
    pop = np.vstack([uniform, sparse])
    return repair_budget(pop, costs, g.budget)


def ga_optimize(g: GameInstance, params: GaParams, stream_seed: int) -> SolveResult:
    """One genetic-algorithm run; deterministic given (g, params, stream_seed).

    Tournament selection, blend crossover clipped to [0, 1], per-gene Gaussian
    mutation, elitism, and uniform-scaling budget repair. Fitness evaluation
    is a pure vectorized pass over the population, so results do not depend on
    any scheduling order.
    """
    rng = np.random.default_rng(int(stream_seed) & (2**64 - 1))
    costs = g.resource_costs
    size = params.population_size
    m_rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / g.n
    n_children = size - params.elitism_count

    pop = _initial_population(g, size, rng)
    fitness = qr_defender_utility_batch(g, pop)

    best_idx = int(np.argmax(fitness))
    best_q = pop[best_idx].copy()
    best_u = float(fitness[best_idx])
    history = [best_u]
    stall = 0
    gens_run = 1

    for _ in range(1, params.generations):
        elite_idx = np.argsort(-fitness, kind="stable")[: params.elitism_count]
        elite = pop[elite_idx]

        entrants = rng.integers(0, size, size=(2, n_children, params.tournament_size))
        pa = entrants[0][np.arange(n_children), np.argmax(fitness[entrants[0]], axis=1)]
        pb = entrants[1][np.arange(n_children), np.argmax(fitness[entrants[1]], axis=1)]
        xa, xb = pop[pa], pop[pb]

        do_cx = rng.random(n_children) < params.crossover_rate
        lo = np.minimum(xa, xb)
        hi = np.maximum(xa, xb)
        span = (hi - lo) * params.blend_alpha
        blend = (lo - span) + rng.random((n_children, g.n)) * (hi - lo + 2 * span)
        children = np.where(do_cx[:, None], blend, xa)

        mutate = rng.random((n_children, g.n)) < m_rate
        noise = rng.normal(0.0, params.mutation_scale, size=(n_children, g.n))
        children = np.clip(children + mutate * noise, 0.0, 1.0)
        repair_budget(children, costs, g.budget)

        pop = np.vstack([elite, children])
        fitness = qr_defender_utility_batch(g, pop)
        gens_run += 1

        gen_best = int(np.argmax(fitness))
        if float(fitness[gen_best]) > best_u + _STALL_EPS:
            best_u = float(fitness[gen_best])
            best_q = pop[gen_best].copy()
            stall = 0
        else:
            if float(fitness[gen_best]) > best_u:
                best_u = float(fitness[gen_best])
                best_q = pop[gen_best].copy()
            stall += 1
        history.append(best_u)
        if stall >= params.stall_generations:
            break

    assert best_q @ costs <= g.budget + _FEAS_TOL
    return SolveResult(
        q_star=DefenseStrategy(best_q, budget_feasible=True),
        utility=best_u,
        iterations_used=gens_run,
        per_iteration_utilities=tuple(history),
        seed=int(stream_seed),
    )


def iga_solve(
    g: GameInstance, times: int = 10, params: GaParams = GaParams()
) -> SolveResult:
    """Restart loop: run the GA ``times`` times and keep the best profile.

    Restart k uses the sub-seed derived from (g.seed, k), so restarts are
    decorrelated yet fully reproducible. The incumbent starts at -inf and the
    returned utility equals the maximum of the per-restart utilities.
    """
    if times < 1:
        raise ValueError("times must be >= 1")
    best: SolveResult | None = None
    best_u = -math.inf
    per_restart = []
    for k in range(times):
        sub_seed = derive_seed(g.seed, STREAM_GA_RESTART, k)
        result = ga_optimize(g, params, sub_seed)
        per_restart.append(result.utility)
        if result.utility > best_u:
            best_u = result.utility
            best = result
    assert best is not None
    return SolveResult(
        q_star=best.q_star,
        utility=best.utility,
        iterations_used=times,
        per_iteration_utilities=tuple(per_restart),
        seed=int(g.seed),
    )


def _grid_levels(grid_step: float) -> np.ndarray:
    k = int(math.floor(1.0 / grid_step + 1e-9)) + 1
    levels = np.arange(k) * grid_step
    if levels[-1] < 1.0 - 1e-12:
        levels = np.append(levels, 1.0)
    return np.minimum(levels, 1.0)


def brute_force_solve(g: GameInstance, grid_step: float) -> SolveResult:
    """Exhaustive scan of the feasible grid {0, step, ..., 1}^N.

    Independent of the GA path: plain enumeration with a deterministic
    first-best tie break (row-major order). Intended as an oracle for small
    instances; refuses grids above the capacity bound.
    """
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid_step must lie in (0, 0.5], got {grid_step}")
    levels = _grid_levels(grid_step)
    n_points = float(len(levels)) ** g.n
    if g.n > 4 or n_points > _MAX_GRID_POINTS:
        raise CapacityError(
            f"grid of {n_points:.3g} points for N={g.n} exceeds the supported size"
        )
    mesh = np.meshgrid(*([levels] * g.n), indexing="ij")
    grid = np.stack(mesh, axis=-1).reshape(-1, g.n)
    costs = g.resource_costs

    best_u = -math.inf
    best_q = np.zeros(g.n)
    evaluated = 0
    for start in range(0, grid.shape[0], _GRID_CHUNK):
        block = grid[start : start + _GRID_CHUNK]
        feasible = block @ costs <= g.budget + _FEAS_TOL
        if not feasible.any():
            continue
        cand = block[feasible]
        utils = qr_defender_utility_batch(g, cand)
        evaluated += cand.shape[0]
        top = int(np.argmax(utils))
        if float(utils[top]) > best_u:
            best_u = float(utils[top])
            best_q = cand[top].copy()
    if not math.isfinite(best_u):
        # The all-zeros corner is always on the grid and always feasible.
        best_q = np.zeros(g.n)
        best_u = float(qr_defender_utility_batch(g, best_q[None, :])[0])
        evaluated += 1
    return SolveResult(
        q_star=DefenseStrategy(best_q, budget_feasible=True),
        utility=best_u,
        iterations_used=evaluated,
        per_iteration_utilities=(best_u,),
        seed=int(g.seed),
    )
