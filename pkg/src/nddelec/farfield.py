"""Radiation (1/r) fields of point charges and the delayed force terms.

With sgn = +1 for the advanced branch, -1 for the retarded branch, unit
vector n from the charge's deviating position to the observation point,
one-sided velocity v and acceleration a at the deviating time, distance r,
kappa = 1 + sgn*(n . v), and charge q, the far fields are

    E = (q/r) n x [(n + sgn v) x a] / kappa^3
    B = sgn (q/r) n x [a / kappa^2 - sgn (n . a) v / kappa^3].

Equivalently, with the observation-time second derivative of the deviating
position D = a w^2 - sgn (n . a) v w^3 (w = dt_dev/dt = 1/kappa; n is held
fixed, its drift only contributes at order 1/r^2):

    B = sgn (q/r) n x D,      E = sgn n x B.

The field at a point is the semi-sum over branches,
E = (E+ + E-)/2 and B = (n+ x E+)/2 - (n- x E-)/2.  Velocity-only motion
has a = 0 and produces exactly zero far fields; near-zone Coulomb and
Biot-Savart terms are intentionally absent from this model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lightcone import (
    ADVANCED,
    RETARDED,
    LightconeHit,
    branch_sign,
    solve_lightcone,
)
from .trajectory import DomainError, PiecewiseTrajectory, as_vec3


class SimulationHorizonError(RuntimeError):
    """A partner's deviating time fell outside its trajectory domain."""


@dataclass(frozen=True)
class FieldSample:
    """Both branch fields and their semi-sum at one observation event."""

    E_plus: np.ndarray
    E_minus: np.ndarray
    B_plus: np.ndarray
    B_minus: np.ndarray
    E: np.ndarray
    B: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    on_breakpoint: bool


def fields_from_hit(hit: LightconeHit, charge: float):
    """Far fields (E, B) of one branch from resolved deviating-time data."""
    sgn = branch_sign(hit.branch)
    n, v, a, r = hit.n, hit.v_dev, hit.a_dev, hit.r
    kappa = 1.0 + sgn * float(n @ v)
    e_field = (charge / r) * np.cross(n, np.cross(n + sgn * v, a)) / kappa**3
    b_field = sgn * (charge / r) * np.cross(
        n, a / kappa**2 - sgn * float(n @ a) * v / kappa**3)
    return e_field, b_field


def obs_second_derivative(hit: LightconeHit) -> np.ndarray:
    """d^2 x_k / dt^2 at fixed line of sight: a w^2 - sgn (n.a) v w^3."""
    sgn = branch_sign(hit.branch)
    w = hit.dtdev_dt
    return hit.a_dev * w**2 - sgn * float(hit.n @ hit.a_dev) * hit.v_dev * w**3


def simple_from_hit(hit: LightconeHit, charge: float):
    """Far fields in second-derivative form: B = sgn (q/r) n x D, E = sgn n x B."""
    sgn = branch_sign(hit.branch)
    b_field = sgn * (charge / hit.r) * np.cross(hit.n, obs_second_derivative(hit))
    e_field = sgn * np.cross(hit.n, b_field)
    return e_field, b_field


def far_fields_pm(traj: PiecewiseTrajectory, x, t: float, branch: str):
    """One branch's far fields at (x, t) from the full formulas."""
    hit = solve_lightcone(traj, x, t, branch)
    return fields_from_hit(hit, traj.charge)


def far_fields_simple(traj: PiecewiseTrajectory, x, t: float, branch: str):
    """One branch's far fields at (x, t) from the second-derivative form."""
    hit = solve_lightcone(traj, x, t, branch)
    return simple_from_hit(hit, traj.charge)


def sample_fields(traj: PiecewiseTrajectory, x, t: float) -> FieldSample:
    """Branch fields and their semi-sum for one source charge at (x, t)."""
    x = as_vec3(x)
    hit_plus = solve_lightcone(traj, x, t, ADVANCED)
    hit_minus = solve_lightcone(traj, x, t, RETARDED)
    e_plus, b_plus = fields_from_hit(hit_plus, traj.charge)
    e_minus, b_minus = fields_from_hit(hit_minus, traj.charge)
    return FieldSample(
        E_plus=e_plus,
        E_minus=e_minus,
        B_plus=b_plus,
        B_minus=b_minus,
        E=0.5 * e_plus + 0.5 * e_minus,
        B=0.5 * np.cross(hit_plus.n, e_plus)
          - 0.5 * np.cross(hit_minus.n, e_minus),
        n_plus=hit_plus.n,
        n_minus=hit_minus.n,
        on_breakpoint=hit_plus.on_breakpoint or hit_minus.on_breakpoint,
    )


def lorentz_rhs(k: int, trajectories, t: float) -> np.ndarray:
    """Force on charge k: q_k (E + v_k x B), fields summed over partners.

    E and B are the semi-sum fields of every other charge evaluated at
    charge k's position.  Raises SimulationHorizonError when a partner's
    deviating time leaves its trajectory domain.
    """
    me = trajectories[k]
    x, v = me.position_velocity(t)
    e_total = np.zeros(3)
    b_total = np.zeros(3)
    for j, other in enumerate(trajectories):
        if j == k:
            continue
        try:
            fs = sample_fields(other, x, t)
        except DomainError as exc:
            raise SimulationHorizonError(
                f"partner {j} has no worldline data on the lightcone of "
                f"(x_{k}, t={t!r}): {exc}") from exc
        e_total += fs.E
        b_total += fs.B
    return me.charge * (e_total + np.cross(v, b_total))


def lowvel_term(hit: LightconeHit, v_observer, q_product: float,
                include_velocity_terms: bool) -> np.ndarray:
    """One branch/partner term of the low-velocity force sum.

    q_product (n + sgn v_obs)/r x [n x D] with the velocity factor, or
    q_product n/r x [n x D] without it.
    """
    d2x = obs_second_derivative(hit)
    front = hit.n
    if include_velocity_terms:
        front = hit.n + branch_sign(hit.branch) * as_vec3(v_observer)
    return q_product * np.cross(front / hit.r, np.cross(hit.n, d2x))


def lowvel_rhs_3body(k: int, trajectories, t: float,
                     include_velocity_terms: bool = False) -> np.ndarray:
    """Four-term delayed force on charge k (two partners, both branches).

    Without velocity factors the sum is linear in the partners' deviating
    accelerations, so piecewise-constant-velocity partners contribute
    exactly zero.  With them, each branch term carries n + sgn v_k(t).
    """
    me = trajectories[k]
    x, v = me.position_velocity(t)
    total = np.zeros(3)
    for j, other in enumerate(trajectories):
        if j == k:
            continue
        for branch in (ADVANCED, RETARDED):
            try:
                hit = solve_lightcone(other, x, t, branch)
            except DomainError as exc:
                raise SimulationHorizonError(
                    f"partner {j} has no worldline data on the {branch} "
                    f"lightcone of (x_{k}, t={t!r}): {exc}") from exc
            total += lowvel_term(hit, v, me.charge * other.charge,
                                 include_velocity_terms)
    return total
