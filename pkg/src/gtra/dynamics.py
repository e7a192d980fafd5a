"""Single-target evolutionary analysis.

For one target the 2x2 payoff matrix reduces to five scalars

    a: attacker payoff when the attack meets protection
    b: defender payoff in the same cell
    c: attacker payoff against an unprotected target
    d: defender payoff against an unprotected target (-reward)
    f: defender payoff for protecting an idle target (-cost)

and the population shares (p, q) of attacking/protecting evolve by replicator
dynamics:

    dp/dt = p (1 - p) [q a + (1 - q) c]
    dq/dt = q (1 - q) [p (b - d) + (1 - p) f]

This module provides the reduction, the vector field, the closed-form
interior rest point, and fixed-step RK4 trajectory integration for phase
portraits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .game import TargetParams, payoff_cell

DEFAULT_DT = 1e-3
DEFAULT_TOL = 1e-8
DEFAULT_MAX_STEPS = 10**6


@dataclass(frozen=True)
class SimplifiedPayoffs:
    """The five scalars of the reduced single-target payoff matrix."""

    a: float
    b: float
    c: float
    d: float
    f: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Integrated (t, p, q) path, clipped to the unit square after each step."""

    points: np.ndarray  # shape (k, 3): t, p, q
    dt: float
    terminated_early: bool
    clipped_steps: int = 0
    clip_magnitude: float = 0.0

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def reduce_payoffs(t: TargetParams, alpha: float) -> SimplifiedPayoffs:
    """Collapse the 2x2 payoff matrix of one target to its five scalars."""
    a_att, b_def = payoff_cell(t, True, True, alpha)
    c_att, d_def = payoff_cell(t, True, False, alpha)
    _, f_def = payoff_cell(t, False, True, alpha)
    return SimplifiedPayoffs(a=a_att, b=b_def, c=c_att, d=d_def, f=f_def)


def replicator_field(sp: SimplifiedPayoffs, p: float, q: float) -> tuple[float, float]:
    """(dp/dt, dq/dt) at a point of the unit square."""
    p_dot = p * (1.0 - p) * (q * sp.a + (1.0 - q) * sp.c)
    q_dot = q * (1.0 - q) * (p * (sp.b - sp.d) + (1.0 - p) * sp.f)
    return (p_dot, q_dot)


def interior_equilibrium(sp: SimplifiedPayoffs) -> tuple[float, float] | None:
    """Closed-form rest point with both brackets of the field at zero.

    Solves q* = c / (c - a) and p* = -f / ((b - d) - f); returned only when
    both lie strictly inside (0, 1), otherwise None (only boundary rest
    points exist).
    """
    denom_q = sp.c - sp.a
    denom_p = (sp.b - sp.d) - sp.f
    if denom_q == 0 or denom_p == 0:
        return None
    q_star = sp.c / denom_q
    p_star = -sp.f / denom_p
    if 0.0 < p_star < 1.0 and 0.0 < q_star < 1.0:
        return (p_star, q_star)
    return None


def rk4_step(sp: SimplifiedPayoffs, p: float, q: float, dt: float) -> tuple[float, float]:
    """One classical Runge-Kutta step of the replicator field."""
    k1p, k1q = replicator_field(sp, p, q)
    k2p, k2q = replicator_field(sp, p + 0.5 * dt * k1p, q + 0.5 * dt * k1q)
    k3p, k3q = replicator_field(sp, p + 0.5 * dt * k2p, q + 0.5 * dt * k2q)
    k4p, k4q = replicator_field(sp, p + dt * k3p, q + dt * k3q)
    return (
        p + dt * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0,
        q + dt * (k1q + 2 * k2q + 2 * k3q + k4q) / 6.0,
    )


def integrate_trajectory(
    sp: SimplifiedPayoffs,
    p0: float,
    q0: float,
    dt: float = DEFAULT_DT,
    max_steps: int = DEFAULT_MAX_STEPS,
    tol: float = DEFAULT_TOL,
) -> Trajectory:
    """Integrate from (p0, q0) until the field norm drops below ``tol``.

    The dynamics leave the unit square invariant analytically; floating-point
    drift is clipped after every step and the clip count/magnitude recorded
    so silent divergence would be visible.
    """
    if not (0.0 <= p0 <= 1.0 and 0.0 <= q0 <= 1.0):
        raise ValueError("initial point must lie in the unit square")
    if dt <= 0 or max_steps < 1 or tol <= 0:
        raise ValueError("dt, max_steps and tol must be positive")
    p, q = float(p0), float(q0)
    points = [(0.0, p, q)]
    clipped = 0
    clip_mag = 0.0
    terminated = False
    for step in range(1, max_steps + 1):
        p_dot, q_dot = replicator_field(sp, p, q)
        if np.hypot(p_dot, q_dot) < tol:
            terminated = True
            break
        p_new, q_new = rk4_step(sp, p, q, dt)
        if not (np.isfinite(p_new) and np.isfinite(q_new)):
            raise NumericError(f"non-finite state at step {step}")
        pc = min(1.0, max(0.0, p_new))
        qc = min(1.0, max(0.0, q_new))
        if pc != p_new or qc != q_new:
            clipped += 1
            clip_mag += abs(pc - p_new) + abs(qc - q_new)
        p, q = pc, qc
        points.append((step * dt, p, q))
    return Trajectory(
        points=np.array(points, dtype=float),
        dt=dt,
        terminated_early=terminated,
        clipped_steps=clipped,
        clip_magnitude=clip_mag,
    )


def phase_portrait(
    sp: SimplifiedPayoffs,
    grid: int,
    dt: float = DEFAULT_DT,
    max_steps: int = DEFAULT_MAX_STEPS,
    tol: float = DEFAULT_TOL,
) -> list[Trajectory]:
    """Trajectories from a grid x grid lattice of interior starting points.

    Start points are {k/(grid+1)}^2 for k = 1..grid, visited row-major in p
    then q, so the output order is deterministic.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    levels = [k / (grid + 1.0) for k in range(1, grid + 1)]
    return [
        integrate_trajectory(sp, p0, q0, dt=dt, max_steps=max_steps, tol=tol)
        for p0 in levels
        for q0 in levels
    ]
