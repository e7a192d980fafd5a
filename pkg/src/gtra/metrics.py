"""Outcome counting and evaluation metrics.

Monte Carlo realizations classify every (trial, target) pair into one of
four cells: attacked+protected (ap), attacked+unprotected (af), idle but
protected (np), idle and unprotected (nf). A protected target under attack
always counts as a successful defense. The metric suite (vulnerability,
coverage, effectiveness, growth rate) is computed from these tallies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import GameInstance, _as_prob_array
from .seeds import STREAM_TRIAL_CHUNK, rng_from

# Trials are sampled in fixed-size chunks, each with its own derived
# sub-stream, so counts are identical no matter how chunks are scheduled.
_CHUNK_TRIALS = 8192


@dataclass(frozen=True)
class OutcomeCounts:
    """Integer tallies of the four attack/protection cells."""

    ap: int
    af: int
    np: int
    nf: int
    trials: int
    n: int

    def __post_init__(self) -> None:
        if min(self.ap, self.af, self.np, self.nf) < 0:
            raise ValueError("cell counts must be >= 0")
        if self.trials < 1 or self.n < 1:
            raise ValueError("trials and n must be >= 1")
        total = self.ap + self.af + self.np + self.nf
        if total != self.trials * self.n:
            raise ValueError(
                f"cells sum to {total}, expected trials*n = {self.trials * self.n}"
            )


@dataclass(frozen=True)
class ExpectedOutcomes:
    """Noise-free analytic cell masses; same shape as OutcomeCounts but real."""

    ap: float
    af: float
    np: float
    nf: float
    trials: int
    n: int


def sample_outcomes(
    g: GameInstance, p, q, trials: int, stream_seed: int
) -> OutcomeCounts:
    """Tally independent Bernoulli attack/protect draws per trial and target.

    For every (trial, target): attack ~ Bernoulli(p_i), protect ~
    Bernoulli(q_i), drawn independently; the matching cell is incremented.
    Deterministic for a given ``stream_seed`` (chunked into fixed sub-streams
    that merge by addition).
    """
    pa = _as_prob_array(p, g.n, "p")
    qa = _as_prob_array(q, g.n, "q")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ap = af = np_ = 0
    done = 0
    chunk = 0
    while done < trials:
        m = min(_CHUNK_TRIALS, trials - done)
        rng = rng_from(stream_seed, STREAM_TRIAL_CHUNK, chunk)
        attacks = rng.random((m, g.n)) < pa
        protects = rng.random((m, g.n)) < qa
        ap += int(np.count_nonzero(attacks & protects))
        af += int(np.count_nonzero(attacks & ~protects))
        np_ += int(np.count_nonzero(~attacks & protects))
        done += m
        chunk += 1
    nf = trials * g.n - ap - af - np_
    return OutcomeCounts(ap=ap, af=af, np=np_, nf=nf, trials=trials, n=g.n)


def expected_outcomes(g: GameInstance, p, q, trials: int = 1) -> ExpectedOutcomes:
    """Analytic cell masses ap_i = p_i*q_i etc., scaled by ``trials``."""
    pa = _as_prob_array(p, g.n, "p")
    qa = _as_prob_array(q, g.n, "q")
    ap = float(np.sum(pa * qa)) * trials
    af = float(np.sum(pa * (1 - qa))) * trials
    np_ = float(np.sum((1 - pa) * qa)) * trials
    nf = trials * g.n - ap - af - np_
    return ExpectedOutcomes(ap=ap, af=af, np=np_, nf=nf, trials=trials, n=g.n)


def vulnerability(c) -> float:
    """Risk indicator (successful - failed attacks) / (all attacks).

    A successful attack is one on an unprotected target (af); an attack on a
    protected target always fails (ap). With no attacks at all the result is
    defined as -1: zero successes is maximal safety.
    """
    success, failure = c.af, c.ap
    total = success + failure
    if total == 0:
        return -1.0
    return (success - failure) / total


def coverage(c) -> float:
    """Fraction of (trial, target) pairs counted as protected: ap + np + nf."""
    return (c.ap + c.np + c.nf) / (c.trials * c.n)


def consumed_resources(g: GameInstance, q) -> float:
    """Resources spent by a defense profile: sum_i q_i * cost_i.

    Under unit accounting (zero-cost scenario) the per-target cost is one, so
    this reduces to the sum of the defense probabilities.
    """
    qa = _as_prob_array(q, g.n, "q")
    return float(qa @ g.resource_costs)


def effectiveness(c, resources: float) -> float:
    """Protected targets per trial per unit of consumed resource.

    Zero resources with zero coverage yields 0; zero resources with positive
    coverage yields the ``inf`` sentinel (free coverage).
    """
    if resources < 0:
        raise ValueError(f"resources must be >= 0, got {resources}")
    covered = (c.ap + c.np + c.nf) / c.trials
    if resources == 0:
        return 0.0 if covered == 0 else math.inf
    return covered / resources


def growth_rate(a: float, b: float) -> float:
    """Relative quality difference (a - b) / b of two solution qualities."""
    if b == 0:
        raise ZeroDivisionError("growth rate is undefined for a zero baseline quality")
    return (a - b) / b
