"""Solver contracts: determinism, feasibility, and oracle agreement."""

import numpy as np
import pytest

from gtra import (
    CapacityError,
    GameInstance,
    GaParams,
    ScenarioConfig,
    TargetParams,
    brute_force_solve,
    derive_seed,
    ga_optimize,
    iga_solve,
    qr_defender_utility,
    sample_instance,
)
from gtra.seeds import STREAM_GA_RESTART

FAST_GA = GaParams(population_size=60, generations=120, stall_generations=30)


def single_target_game(defense_cost=0.01, budget=1.0, seed=5):
    t = TargetParams(id=1, attack_reward=2.0, attack_penalty=1.0, defense_cost=defense_cost, attack_cost=0.5)
    return GameInstance(targets=(t,), budget=budget, alpha=0.8, lam=1.5, seed=seed)


def scan_single_target(g, step=1e-3):
    """Independent 1-D oracle: direct objective scan, softmax of one is 1."""
    t = g.targets[0]
    best_q, best_u = 0.0, -np.inf
    k = 0
    while True:
        q = k * step
        if q > 1.0:
            break
        if q * t.defense_cost <= g.budget + 1e-12:
            u = (g.alpha * q * (t.attack_penalty + t.attack_reward) - t.attack_reward) - q * t.defense_cost
            if u > best_u:
                best_q, best_u = q, u
        k += 1
    return best_q, best_u


class TestGaOptimize:
    def test_zero_budget_returns_all_zeros(self):
        g = single_target_game(budget=0.0)
        res = ga_optimize(g, FAST_GA, 99)
        assert res.q_star.q == pytest.approx([0.0])
        assert res.utility == pytest.approx(qr_defender_utility(g, [0.0]))

    def test_finds_boundary_maximizer(self):
        # gradient of the objective is positive across [0, 1] for these values
        g = single_target_game()
        scan_q, scan_u = scan_single_target(g)
        assert scan_q == pytest.approx(1.0)
        res = ga_optimize(g, GaParams(), 12345)
        assert res.q_star.q[0] >= 0.999
        assert res.utility >= scan_u - 1e-3

    def test_bit_identical_repeat(self):
        g = single_target_game(seed=77)
        r1 = ga_optimize(g, FAST_GA, 31337)
        r2 = ga_optimize(g, FAST_GA, 31337)
        assert np.array_equal(r1.q_star.q, r2.q_star.q)
        assert r1.utility == r2.utility
        assert r1.per_iteration_utilities == r2.per_iteration_utilities

    def test_utility_matches_profile(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            g = _random_instance(rng)
            res = ga_optimize(g, FAST_GA, int(rng.integers(0, 2**32)))
            assert res.utility == pytest.approx(qr_defender_utility(g, res.q_star), abs=1e-9)

    def test_feasible_and_in_range(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            g = _random_instance(rng)
            res = ga_optimize(g, FAST_GA, int(rng.integers(0, 2**32)))
            q = res.q_star.q
            assert (q >= 0).all() and (q <= 1).all()
            assert float(q @ g.resource_costs) <= g.budget + 1e-9


def _random_instance(rng, n=None):
    n = n if n is not None else int(rng.integers(1, 6))
    targets = tuple(
        TargetParams(
            id=i + 1,
            attack_reward=float(rng.uniform(1, 10)),
            attack_penalty=float(rng.uniform(1, 10)),
            defense_cost=float(rng.uniform(0.1, 0.5)),
            attack_cost=float(rng.uniform(0, 0.3)),
        )
        for i in range(n)
    )
    return GameInstance(
        targets=targets,
        budget=float(rng.uniform(0, 0.4 * n)),
        alpha=0.8,
        lam=1.5,
        seed=int(rng.integers(0, 2**32)),
    )


class TestIgaSolve:
    def test_single_restart_equals_ga_run(self):
        g = single_target_game(seed=21)
        via_iga = iga_solve(g, times=1, params=FAST_GA)
        direct = ga_optimize(g, FAST_GA, derive_seed(g.seed, STREAM_GA_RESTART, 0))
        assert np.array_equal(via_iga.q_star.q, direct.q_star.q)
        assert via_iga.utility == direct.utility

    def test_returns_max_of_restarts(self):
        g = _random_instance(np.random.default_rng(14), n=3)
        res = iga_solve(g, times=6, params=FAST_GA)
        assert len(res.per_iteration_utilities) == 6
        assert res.utility == max(res.per_iteration_utilities)
        running = np.maximum.accumulate(res.per_iteration_utilities)
        assert (np.diff(running) >= 0).all()

    def test_restarts_deterministic(self):
        g = _random_instance(np.random.default_rng(15), n=2)
        r1 = iga_solve(g, times=4, params=FAST_GA)
        r2 = iga_solve(g, times=4, params=FAST_GA)
        assert np.array_equal(r1.q_star.q, r2.q_star.q)
        assert r1.per_iteration_utilities == r2.per_iteration_utilities

    def test_tracks_grid_oracle_on_small_instances(self):
        cfg = ScenarioConfig(scenario="HighSec", n=2, gamma=0.1, instances=8, master_seed=808)
        for idx in range(8):
            g = sample_instance(cfg, idx)
            got = iga_solve(g, times=10).utility
            want = brute_force_solve(g, 0.01).utility
            assert got >= want - 1e-2


class TestBruteForce:
    def test_three_point_scan(self):
        g = single_target_game(defense_cost=0.3, budget=5.0)
        res = brute_force_solve(g, 0.5)
        candidates = {q: qr_defender_utility(g, [q]) for q in (0.0, 0.5, 1.0)}
        best_q = max(candidates, key=candidates.get)
        assert res.q_star.q == pytest.approx([best_q])
        assert res.utility == pytest.approx(candidates[best_q])

    def test_zero_budget(self):
        g = single_target_game(budget=0.0)
        res = brute_force_solve(g, 0.25)
        assert res.q_star.q == pytest.approx([0.0])

    def test_respects_budget(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            g = _random_instance(rng, n=2)
            res = brute_force_solve(g, 0.1)
            assert float(res.q_star.q @ g.resource_costs) <= g.budget + 1e-9

    def test_symmetric_instance_permutation_equivalent(self):
        t = TargetParams(id=1, attack_reward=2.0, attack_penalty=1.0, defense_cost=0.3, attack_cost=0.5)
        t2 = TargetParams(id=2, attack_reward=2.0, attack_penalty=1.0, defense_cost=0.3, attack_cost=0.5)
        g = GameInstance(targets=(t, t2), budget=0.3, alpha=0.8, lam=1.5, seed=1)
        g_swapped = GameInstance(targets=(t2, t), budget=0.3, alpha=0.8, lam=1.5, seed=1)
        res = brute_force_solve(g, 0.05)
        res_swapped = brute_force_solve(g_swapped, 0.05)
        assert res.utility == pytest.approx(res_swapped.utility, abs=1e-12)
        assert np.allclose(np.sort(res.q_star.q), np.sort(res_swapped.q_star.q))

    def test_capacity_guard(self):
        rng = np.random.default_rng(32)
        g = _random_instance(rng, n=5)
        with pytest.raises(CapacityError):
            brute_force_solve(g, 0.02)
        g4 = _random_instance(rng, n=4)
        with pytest.raises(CapacityError):
            brute_force_solve(g4, 0.01)

    def test_grid_step_validation(self):
        g = single_target_game()
        with pytest.raises(ValueError):
            brute_force_solve(g, 0.0)
        with pytest.raises(ValueError):
            brute_force_solve(g, 0.7)


class TestRepair:
    def test_scaling_keeps_genes_in_range(self):
        from gtra.solver import repair_budget

        rng = np.random.default_rng(33)
        costs = rng.uniform(0.1, 1.0, 6)
        profiles = rng.uniform(0, 1, (200, 6))
        repaired = repair_budget(profiles.copy(), costs, 0.5)
        assert (repaired >= 0).all() and (repaired <= 1).all()
        assert (repaired @ costs <= 0.5 + 1e-9).all()

    def test_feasible_rows_untouched(self):
        from gtra.solver import repair_budget

        costs = np.array([0.5, 0.5])
        profiles = np.array([[0.4, 0.4], [1.0, 1.0]])
        repaired = repair_budget(profiles.copy(), costs, 0.5)
        assert repaired[0] == pytest.approx([0.4, 0.4])
        assert float(repaired[1] @ costs) == pytest.approx(0.5)
