"""Deviating-time solving on the forward and backward lightcones.

For an observation event (x, t) and a sub-luminal worldline x_k, the
advanced/retarded times solve the implicit equation

    t_dev = t + sgn * |x_k(t_dev) - x|,   sgn = +1 advanced, -1 retarded.

Sub-luminality (v_max < 1) makes the map s -> t + sgn*|x_k(s) - x| a
contraction, so the root is unique.  We iterate that map to 1e-6 and finish
with Newton on f(s) = s - t - sgn*|x_k(s) - x|, whose slope
1 + sgn*(n . v) is bounded below by 1 - v_max > 0.

Kinematic data at the deviating time is taken from the causal side when the
root lands exactly on a velocity/acceleration breakpoint: the left limit for
the retarded branch, the right limit for the advanced branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import (
    LEFT,
    RIGHT,
    DomainError,
    PiecewiseTrajectory,
    as_vec3,
)

RETARDED = "retarded"
ADVANCED = "advanced"

_FIXED_POINT_TOL = 1e-6
_MAX_FIXED_POINT = 400
_MAX_NEWTON = 60


class ConvergenceError(ArithmeticError):
    """The deviating-time iteration failed to meet its residual tolerance."""


class SingularityError(ArithmeticError):
    """A deviating-derivative denominator fell below its sub-luminal floor."""


def branch_sign(branch: str) -> float:
    """+1 for the advanced branch, -1 for the retarded branch."""
    if branch == ADVANCED:
        return 1.0
    if branch == RETARDED:
        return -1.0
    raise ValueError(f"branch must be '{RETARDED}' or '{ADVANCED}'")


def causal_side(branch: str) -> str:
    """One-sided limit used at breakpoints: left if retarded, right if advanced."""
    return LEFT if branch_sign(branch) < 0.0 else RIGHT


@dataclass(frozen=True)
class LightconeHit:
    """Resolved deviating-time data for one branch.

    ``n`` points from the charge's deviating position to the observation
    point; ``v_dev``/``a_dev`` are one-sided limits from the causal side;
    ``dtdev_dt`` is d(t_dev)/dt; ``on_breakpoint`` flags a root landing on a
    trajectory breakpoint, where field values are one-sided limits.
    """

    branch: str
    t_dev: float
    r: float
    n: np.ndarray
    v_dev: np.ndarray
    a_dev: np.ndarray
    dtdev_dt: float
    on_breakpoint: bool
    v_max: float


def solve_lightcone(traj: PiecewiseTrajectory, x, t: float, branch: str,
                    initial_guess: float | None = None) -> LightconeHit:
    """Solve t_dev = t +/- |x_k(t_dev) - x| for one branch.

    Raises DomainError when the root falls outside the worldline's time
    domain and ValueError when the observation point touches the worldline
    (self-evaluation is excluded from the model).
    """
    x = as_vec3(x)
    sgn = branch_sign(branch)
    side = causal_side(branch)
    t_lo, t_hi = traj.t_start, traj.t_end
    tol = 1e-12 * (1.0 + abs(t))

    def clamped(s: float) -> float:
        return min(max(s, t_lo), t_hi)

    s = clamped(t if initial_guess is None else float(initial_guess))
    for _ in range(_MAX_FIXED_POINT):
        d = x - traj.position(clamped(s), side)
        s_new = t + sgn * math.sqrt(float(d @ d))
        done = abs(s_new - s) <= _FIXED_POINT_TOL
        s = s_new
        if done:
            break

    for _ in range(_MAX_NEWTON):
        sc = clamped(s)
        pos, vel = traj.position_velocity(sc, side)
        d = x - pos
        r = math.sqrt(float(d @ d))
        if r == 0.0:
            raise ValueError(
                "observation point lies on the worldline at the deviating "
                "time; self-evaluation is excluded")
        f = s - t - sgn * r
        if s == sc:
            slope = 1.0 + sgn * float(d @ vel) / r
        else:
            slope = 1.0  # outside the domain the clamped distance is frozen
        step = f / slope
        s -= step
        if abs(step) <= 0.25 * tol:
            break

    slack = 1e-9 * (1.0 + abs(t))
    if s < t_lo - slack or s > t_hi + slack:
        raise DomainError(
            f"deviating time {s!r} outside trajectory domain "
            f"[{t_lo!r}, {t_hi!r}]")
    s = clamped(s)

    pos, vel = traj.position_velocity(s, side)
    d = x - pos
    r = math.sqrt(float(d @ d))
    if r == 0.0:
        raise ValueError(
            "observation point lies on the worldline at the deviating time; "
            "self-evaluation is excluded")
    residual = s - t - sgn * r
    if abs(residual) > tol:
        raise ConvergenceError(
            f"deviating-time residual {residual!r} exceeds tolerance {tol!r}")
    n = d / r
    denom = 1.0 + sgn * float(n @ vel)
    _check_denominator(denom, traj.v_max)
    return LightconeHit(
        branch=branch,
        t_dev=float(s),
        r=r,
        n=n,
        v_dev=vel,
        a_dev=traj.acceleration(s, side),
        dtdev_dt=1.0 / denom,
        on_breakpoint=traj.is_boundary(s, tol=slack),
        v_max=traj.v_max,
    )


def deviating_derivative(hit: LightconeHit, branch: str | None = None) -> float:
    """d(t_dev)/dt = 1 / (1 +/- n . v_dev) for the requested branch."""
    sgn = branch_sign(hit.branch if branch is None else branch)
    denom = 1.0 + sgn * float(hit.n @ hit.v_dev)
    _check_denominator(denom, hit.v_max)
    return 1.0 / denom


def _check_denominator(denom: float, v_max: float) -> None:
    if denom < (1.0 - v_max) - 1e-12:
        raise SingularityError(
            f"deviating-derivative denominator {denom!r} below sub-luminal "
            f"floor {1.0 - v_max!r}")
