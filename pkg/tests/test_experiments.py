"""Strategy comparison machinery."""

import math

import numpy as np
import pytest

from gtra import GaParams, ScenarioConfig, sample_instance
from gtra.experiments import (
    STRATEGY_NAMES,
    compare_config,
    compare_instance,
    mean_outcomes,
    realize_strategy,
)

SMALL_GA = GaParams(population_size=40, generations=60, stall_generations=20)


def small_cfg(instances=3):
    return ScenarioConfig(
        scenario="HighSec", n=8, gamma=0.1, alpha=0.8, lam=1.5, instances=instances, master_seed=555
    )


class TestCompareInstance:
    def test_all_strategies_scored(self):
        g = sample_instance(small_cfg(), 0)
        outcomes = compare_instance(g, trials=400, times=2, ga=SMALL_GA)
        assert tuple(o.strategy for o in outcomes) == STRATEGY_NAMES
        for o in outcomes:
            assert math.isfinite(o.defender_utility)
            assert -1.0 <= o.vulnerability <= 1.0
            assert 0.0 <= o.coverage <= 1.0

    def test_allones_is_exact(self):
        g = sample_instance(small_cfg(), 1)
        outcomes = compare_instance(g, trials=400, times=2, ga=SMALL_GA)
        by_name = {o.strategy: o for o in outcomes}
        assert by_name["AllOneS"].vulnerability == -1.0
        assert by_name["AllOneS"].coverage == 1.0

    def test_ne_feasible(self):
        g = sample_instance(small_cfg(), 2)
        outcomes = compare_instance(g, trials=200, times=2, ga=SMALL_GA)
        by_name = {o.strategy: o for o in outcomes}
        assert by_name["NE"].feasible
        assert by_name["NE"].consumption <= g.budget + 1e-9

    def test_deterministic(self):
        g = sample_instance(small_cfg(), 0)
        a = compare_instance(g, trials=300, times=2, ga=SMALL_GA)
        b = compare_instance(g, trials=300, times=2, ga=SMALL_GA)
        assert [o.defender_utility for o in a] == [o.defender_utility for o in b]
        assert [o.vulnerability for o in a] == [o.vulnerability for o in b]

    def test_unknown_strategy_rejected(self):
        g = sample_instance(small_cfg(), 0)
        with pytest.raises(ValueError):
            realize_strategy("Nope", g)


class TestCompareConfig:
    def test_thread_count_does_not_change_results(self):
        cfg = small_cfg(instances=4)
        seq = compare_config(cfg, trials=300, times=2, ga=SMALL_GA, threads=1)
        par = compare_config(cfg, trials=300, times=2, ga=SMALL_GA, threads=8)
        assert len(seq) == len(par) == 4
        for row_a, row_b in zip(seq, par):
            for a, b in zip(row_a, row_b):
                assert a == b

    def test_mean_outcomes_shape(self):
        cfg = small_cfg(instances=3)
        rows = compare_config(cfg, trials=200, times=2, ga=SMALL_GA)
        means = mean_outcomes(rows)
        assert set(means) == set(STRATEGY_NAMES)
        got = means["AllOneS"]["coverage"]
        expected = float(np.mean([r[4].coverage for r in rows]))
        assert got == pytest.approx(expected)
