"""Domain types and closed-form utilities of the allocation game.

A defender covers ``N`` targets with protection probabilities ``q`` under a
resource budget; an attacker answers with attack probabilities ``p``. Both
players pay an action cost whenever they act, independent of the outcome, so
the per-target payoff matrix is

    =============  ==========================  ====================
    (row: attack)  protect (q_i)               not protect (1-q_i)
    =============  ==========================  ====================
    attack (p_i)   -a*P + (1-a)*R - Ca,        R - Ca,
                   a*P - (1-a)*R - Cm          -R
    no attack      0, -Cm                      0, 0
    =============  ==========================  ====================

with ``a`` the defender's attack-prediction accuracy, ``R``/``P`` the attack
reward/penalty magnitudes, and ``Ca``/``Cm`` the attack/defense action costs.
Summing the bilinear expectation of the four cells over targets gives the
closed-form total utilities implemented below; the attacker side may be
perfectly rational (bang-bang best response) or boundedly rational (softmax
over per-target utilities with precision ``lam``).

All functions here are pure and free of randomness; values are safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import DimensionError, NumericError

#: Default attack-prediction accuracy.
DEFAULT_ALPHA = 0.8
#: Default softmax precision of the boundedly rational attacker.
DEFAULT_LAMBDA = 1.5

_SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class TargetParams:
    """Value and cost parameters of one protected asset.

    ``attack_penalty`` is stored as a nonnegative magnitude; the utility
    formulas apply all signs themselves. ``defense_penalty`` is carried for
    scenario fidelity only and enters no equation.
    """

    id: int
    attack_reward: float
    attack_penalty: float
    defense_cost: float
    attack_cost: float
    defense_penalty: float | None = None

    def __post_init__(self) -> None:
        vals = (self.attack_reward, self.attack_penalty, self.defense_cost, self.attack_cost)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"target {self.id}: all value fields must be finite, got {vals}")
        if self.attack_reward < 0 or self.attack_penalty < 0:
            raise ValueError(f"target {self.id}: reward and penalty magnitudes must be >= 0")
        if self.defense_cost < 0 or self.attack_cost < 0:
            raise ValueError(f"target {self.id}: action costs must be >= 0")


@dataclass(frozen=True)
class GameInstance:
    """One complete game: targets, budget, accuracy, attacker noise, seed.

    ``seed`` feeds every stochastic operation run against this instance.
    ``unit_resources`` switches budget accounting from per-target defense
    costs to one unit per probability point (used by the zero-cost scenario,
    where protection is free in the utility but coverage is still limited by
    the budget ``sum(q) <= budget``).
    """

    targets: tuple[TargetParams, ...]
    budget: float
    alpha: float = DEFAULT_ALPHA
    lam: float = DEFAULT_LAMBDA
    seed: int = 0
    unit_resources: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(self.targets) < 1:
            raise ValueError("a game needs at least one target")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not np.isfinite(self.budget) or self.budget < 0:
            raise ValueError(f"budget must be finite and >= 0, got {self.budget}")
        if not self.unit_resources:
            bad = [t.id for t in self.targets if t.defense_cost <= 0]
            if bad:
                raise ValueError(
                    f"defense_cost must be > 0 under cost-based budget accounting "
                    f"(it divides the budget); offending targets: {bad}"
                )

    @property
    def n(self) -> int:
        return len(self.targets)

    def _array(self, attr: str) -> np.ndarray:
        arr = np.array([getattr(t, attr) for t in self.targets], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def rewards(self) -> np.ndarray:
        return self._array("attack_reward")

    @cached_property
    def penalties(self) -> np.ndarray:
        return self._array("attack_penalty")

    @cached_property
    def defense_costs(self) -> np.ndarray:
        return self._array("defense_cost")

    @cached_property
    def attack_costs(self) -> np.ndarray:
        return self._array("attack_cost")

    @cached_property
    def resource_costs(self) -> np.ndarray:
        """Per-target budget weights: defense costs, or ones under unit accounting."""
        if self.unit_resources:
            arr = np.ones(self.n)
            arr.setflags(write=False)
            return arr
        return self.defense_costs

    def with_(self, **changes) -> "GameInstance":
        """Copy with selected fields replaced (targets shared)."""
        return replace(self, **changes)


def _as_prob_array(values, n: int, what: str) -> np.ndarray:
    """Coerce a strategy or sequence to a validated float vector of length n."""
    raw = getattr(values, "q", None)
    if raw is None:
        raw = getattr(values, "p", None)
    if raw is None:
        raw = values
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DimensionError(f"{what} has length {arr.shape}, instance has {n} targets")
    if not np.isfinite(arr).all():
        raise ValueError(f"{what} contains non-finite entries")
    if (arr < -1e-12).any() or (arr > 1 + 1e-12).any():
        raise ValueError(f"{what} entries must lie in [0, 1]")
    return np.clip(arr, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class DefenseStrategy:
    """Per-target protection probabilities.

    ``budget_feasible`` records whether the producer certified the budget
    constraint ``sum(q_i * cost_i) <= budget``; ``None`` means unlabelled.
    """

    q: np.ndarray
    budget_feasible: bool | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.q, dtype=float)
        if arr.ndim != 1:
            raise ValueError("q must be a flat vector")
        if not np.isfinite(arr).all() or (arr < 0).any() or (arr > 1).any():
            raise ValueError("q entries must be finite and lie in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "q", arr)

    def __len__(self) -> int:
        return self.q.shape[0]

    def consumption(self, g: GameInstance) -> float:
        return float(self.q @ g.resource_costs)

    @classmethod
    def for_instance(cls, q, g: GameInstance, tol: float = 1e-9) -> "DefenseStrategy":
        """Build a strategy and label its budget feasibility against ``g``."""
        arr = _as_prob_array(q, g.n, "q")
        feasible = bool(arr @ g.resource_costs <= g.budget + tol)
        return cls(arr, budget_feasible=feasible)


@dataclass(frozen=True, eq=False)
class AttackStrategy:
    """Per-target attack probabilities.

    ``normalized`` is True for softmax responses (probabilities sum to one)
    and False for the rational best response, whose entries are independent
    per-target probabilities.
    """

    p: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        arr = np.asarray(self.p, dtype=float)
        if arr.ndim != 1:
            raise ValueError("p must be a flat vector")
        if not np.isfinite(arr).all() or (arr < 0).any() or (arr > 1).any():
            raise ValueError("p entries must be finite and lie in [0, 1]")
        if self.normalized and abs(float(arr.sum()) - 1.0) > _SIMPLEX_TOL:
            raise ValueError(f"normalized strategy must sum to 1, got {arr.sum()!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def __len__(self) -> int:
        return self.p.shape[0]


def payoff_cell(
    t: TargetParams, attacker_acts: bool, defender_acts: bool, alpha: float
) -> tuple[float, float]:
    """(attacker payoff, defender payoff) for one cell of the 2x2 matrix."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    r, p = t.attack_reward, t.attack_penalty
    cm, ca = t.defense_cost, t.attack_cost
    if attacker_acts and defender_acts:
        return (-alpha * p + (1 - alpha) * r - ca, alpha * p - (1 - alpha) * r - cm)
    if attacker_acts:
        return (r - ca, -r)
    if defender_acts:
        return (0.0, -cm)
    return (0.0, 0.0)


def defender_utility(g: GameInstance, p, q) -> float:
    """Total defender utility sum_i q_i*[a*p_i*(P_i+R_i) - Cm_i] - p_i*R_i."""
    pa = _as_prob_array(p, g.n, "p")
    qa = _as_prob_array(q, g.n, "q")
    gain = g.alpha * pa * (g.penalties + g.rewards) - g.defense_costs
    return float(np.sum(qa * gain - pa * g.rewards))


def attacker_utility(g: GameInstance, p, q) -> float:
    """Total attacker utility sum_i p_i*[-a*q_i*(P_i+R_i) + (R_i - Ca_i)]."""
    pa = _as_prob_array(p, g.n, "p")
    qa = _as_prob_array(q, g.n, "q")
    return float(np.sum(pa * (-g.alpha * qa * (g.penalties + g.rewards) + g.rewards - g.attack_costs)))


def per_target_attacker_utility(t: TargetParams, q_i: float, alpha: float) -> float:
    """Attacker utility of hitting one target protected with probability q_i."""
    if not 0.0 <= q_i <= 1.0:
        raise ValueError(f"q_i must lie in [0, 1], got {q_i}")
    return -alpha * q_i * (t.attack_penalty + t.attack_reward) + (t.attack_reward - t.attack_cost)


def per_target_attacker_utilities(g: GameInstance, q) -> np.ndarray:
    """Vector of per-target attacker utilities for a full defense profile."""
    qa = _as_prob_array(q, g.n, "q")
    return -g.alpha * qa * (g.penalties + g.rewards) + g.rewards - g.attack_costs


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction; raises on non-finite input."""
    if not np.isfinite(z).all():
        raise NumericError("non-finite softmax exponent")
    shifted = z - z.max(axis=-1, keepdims=True)
    w = np.exp(shifted)
    return w / w.sum(axis=-1, keepdims=True)


def qr_attack_distribution(g: GameInstance, q) -> AttackStrategy:
    """Softmax attack distribution p_i proportional to exp(lam * u_i).

    ``lam = 0`` gives the exact uniform distribution; large ``lam``
    concentrates all mass on the argmax-utility targets. The exponent is
    shifted by its maximum before exponentiation so large ``lam`` cannot
    overflow.
    """
    u = per_target_attacker_utilities(g, q)
    p = _softmax_rows(g.lam * u)
    return AttackStrategy(p, normalized=True)


def qr_defender_utility(g: GameInstance, q) -> float:
    """Defender utility against the softmax attacker response to ``q``."""
    qa = _as_prob_array(q, g.n, "q")
    return float(qr_defender_utility_batch(g, qa[None, :])[0])


def qr_defender_utility_batch(g: GameInstance, profiles: np.ndarray) -> np.ndarray:
    """Vectorized ``qr_defender_utility`` over rows of ``profiles``.

    Used by the solver to score whole populations in one pass; semantics per
    row are identical to the scalar function.
    """
    qm = np.asarray(profiles, dtype=float)
    if qm.ndim != 2 or qm.shape[1] != g.n:
        raise DimensionError(f"profile matrix has shape {qm.shape}, expected (*, {g.n})")
    pr = g.penalties + g.rewards
    u = -g.alpha * qm * pr + (g.rewards - g.attack_costs)
    p = _softmax_rows(g.lam * u)
    per_target = (g.alpha * qm * pr - g.rewards) * p - qm * g.defense_costs
    return per_target.sum(axis=1)


def rational_best_response(g: GameInstance, q) -> AttackStrategy:
    """Bang-bang maximizer of the attacker utility over independent p_i.

    The objective is linear in each p_i on the box [0, 1], so the maximum
    sits at p_i = 1 exactly when the per-target utility is positive. A
    utility of exactly zero resolves to p_i = 0, which keeps the defender's
    evaluation conservative and deterministic.
    """
    u = per_target_attacker_utilities(g, q)
    return AttackStrategy((u > 0).astype(float), normalized=False)
