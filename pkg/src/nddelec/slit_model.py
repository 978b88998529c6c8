"""Piecewise-constant-velocity double-slit estimates in c = e = 1 units.

A scattered charge (index 3) acquires a single velocity jump that must be
balanced, in lightcone, by velocity jumps of the bound slit charges.  The
balance is continuity of the local four-momentum-like pair (gamma_i, P_i):

    gamma_i = m_i/sqrt(1 - v_i^2)
              - sum_j [ 1/(2 r_ij- (1 - n_ij- . v_j-))
                      + 1/(2 r_ij+ (1 + n_ij+ . v_j+)) ]
    P_i     = m_i v_i/sqrt(1 - v_i^2)
              - sum_j [ v_j- /(2 r_ij- (1 - n_ij- . v_j-))
                      + v_j+ /(2 r_ij+ (1 + n_ij+ . v_j+)) ].

The transverse component of the P balance fixes the closest-approach scale

    L = |v1-| / (m3 |v3| (1 - n31 . v1-)),

the recoil shared with the heavy nucleus fixes the velocity factor

    1/(1 - n31 . v1-) = (sqrt(2) m_p/m_e)^(2/3),

and together they give the interference length

    lambda = (sqrt(2) m_p/m_e)^(2/3) / (m3 |v3|),

inversely proportional to the incoming momentum.  hbar enters only as an
input constant (hbar = 1/alpha in these units) for comparisons against the
textbook 2 pi hbar/(m v) and for the slit-separation rule a = hbar/(m v).
Interference directions follow the far-zone path-difference condition
a sin(theta) = n L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .trajectory import as_vec3

HBAR = 137.035999  # inverse fine-structure constant: hbar in e = c = 1 units
MASS_RATIO_DEFAULT = 1836.15267  # proton-to-electron mass ratio


class SingularConfigurationError(ValueError):
    """A lightcone distance or balance denominator degenerated to zero."""


@dataclass(frozen=True)
class SlitConfig:
    """Inputs of the double-slit estimate."""

    a: float
    m_scattered: float = 1.0
    m_e: float = 1.0
    mass_ratio: float = MASS_RATIO_DEFAULT
    v3: float = 0.01
    n_electrons_per_site: int = 1

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError("slit separation a must be positive")
        if not (self.m_scattered > 0.0 and self.m_e > 0.0
                and self.mass_ratio > 0.0):
            raise ValueError("masses must be positive")
        if not 0.0 < self.v3 < 1.0:
            raise ValueError("incoming speed v3 must lie in (0, 1)")
        if int(self.n_electrons_per_site) != self.n_electrons_per_site \
                or self.n_electrons_per_site < 1:
            raise ValueError("n_electrons_per_site must be a positive integer")

    @property
    def m_p(self) -> float:
        return self.mass_ratio * self.m_e


@dataclass(frozen=True)
class PartnerTerm:
    """Both-branch lightcone data of one partner charge."""

    r_minus: float
    n_minus: np.ndarray
    v_minus: np.ndarray
    r_plus: float
    n_plus: np.ndarray
    v_plus: np.ndarray

    def __post_init__(self) -> None:
        if self.r_minus <= 0.0 or self.r_plus <= 0.0:
            raise SingularConfigurationError(
                "lightcone distances must be positive")
        object.__setattr__(self, "n_minus", as_vec3(self.n_minus))
        object.__setattr__(self, "v_minus", as_vec3(self.v_minus))
        object.__setattr__(self, "n_plus", as_vec3(self.n_plus))
        object.__setattr__(self, "v_plus", as_vec3(self.v_plus))


@dataclass(frozen=True)
class LocalMomentum:
    """Time-like and vector components of the local momentum pair."""

    gamma: float
    P: np.ndarray


@dataclass(frozen=True)
class DiscontinuityBalance:
    """Pre/post states of one velocity jump at a single spacetime point."""

    mass: float
    v_pre: np.ndarray
    v_post: np.ndarray
    partners_pre: tuple = field(default_factory=tuple)
    partners_post: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "v_pre", as_vec3(self.v_pre))
        object.__setattr__(self, "v_post", as_vec3(self.v_post))
        object.__setattr__(self, "partners_pre", tuple(self.partners_pre))
        object.__setattr__(self, "partners_post", tuple(self.partners_post))


def _kinematic_factor(velocity: np.ndarray) -> float:
    speed2 = float(velocity @ velocity)
    if speed2 >= 1.0:
        raise ValueError("sub-luminal velocity required")
    return 1.0 / math.sqrt(1.0 - speed2)


def local_momentum(mass: float, velocity, partners=()) -> LocalMomentum:
    """Evaluate (gamma, P) for one particle given partner lightcone data."""
    velocity = as_vec3(velocity)
    gamma = mass * _kinematic_factor(velocity)
    momentum = mass * _kinematic_factor(velocity) * velocity
    for term in partners:
        denom_minus = term.r_minus * (1.0 - float(term.n_minus @ term.v_minus))
        denom_plus = term.r_plus * (1.0 + float(term.n_plus @ term.v_plus))
        if denom_minus == 0.0 or denom_plus == 0.0:
            raise SingularConfigurationError("balance denominator vanished")
        gamma -= 0.5 / denom_minus + 0.5 / denom_plus
        momentum = momentum - 0.5 * term.v_minus / denom_minus \
            - 0.5 * term.v_plus / denom_plus
    return LocalMomentum(gamma=gamma, P=momentum)


def balance_residual(event: DiscontinuityBalance):
    """(post minus pre) of the local momentum pair across a velocity jump."""
    pre = local_momentum(event.mass, event.v_pre, event.partners_pre)
    post = local_momentum(event.mass, event.v_post, event.partners_post)
    return post.gamma - pre.gamma, post.P - pre.P


def closest_approach_L(config: SlitConfig, v1_minus, n31,
                       v1_plus=None, n31_plus=None) -> float:
    """Closest-approach scale of the scattering jump.

    Default form uses the stated simplifications (equal branch denominators
    and speeds): L = |v1-| / (m3 |v3| (1 - n31 . v1-)).  Passing the
    post-jump branch data evaluates the two half-terms separately instead.
    """
    v1_minus = as_vec3(v1_minus)
    n31 = as_vec3(n31)
    speed_minus = float(np.linalg.norm(v1_minus))
    transfer = config.m_scattered * config.v3
    if transfer <= 0.0:
        raise ValueError("scattered momentum m3*|v3| must be positive")
    denom_minus = 1.0 - float(n31 @ v1_minus)
    if denom_minus <= 0.0:
        raise SingularConfigurationError(
            "retarded balance denominator must be positive")
    if v1_plus is None:
        return speed_minus / (transfer * denom_minus)
    v1_plus = as_vec3(v1_plus)
    n31_plus = n31 if n31_plus is None else as_vec3(n31_plus)
    denom_plus = 1.0 + float(n31_plus @ v1_plus)
    if denom_plus <= 0.0:
        raise SingularConfigurationError(
            "advanced balance denominator must be positive")
    speed_plus = float(np.linalg.norm(v1_plus))
    return (0.5 * speed_minus / denom_minus
            + 0.5 * speed_plus / denom_plus) / transfer


def recoil_factor(mass_ratio: float) -> float:
    """Velocity factor 1/(1 - n31 . v1-) = (sqrt(2) m_p/m_e)^(2/3)."""
    if mass_ratio <= 0.0:
        raise ValueError("mass ratio must be positive")
    return (math.sqrt(2.0) * mass_ratio) ** (2.0 / 3.0)


def de_broglie_length(config: SlitConfig) -> float:
    """Interference length (sqrt(2) m_p/m_e)^(2/3) / (m3 |v3|).

    Independent of n_electrons_per_site: n electrons sharing the recoil of a
    nucleus of mass n*m_p leave the mass ratio unchanged.
    """
    return recoil_factor(config.mass_ratio) / (config.m_scattered * config.v3)


def popular_wavelength(m: float, v: float, hbar: float = HBAR) -> float:
    """Textbook matter wavelength 2 pi hbar / (m v) used for comparison."""
    if m <= 0.0 or v <= 0.0:
        raise ValueError("mass and speed must be positive")
    return 2.0 * math.pi * hbar / (m * v)


def de_broglie_ratio(config: SlitConfig, hbar: float = HBAR) -> float:
    """(2 pi hbar/(m3 v3)) / lambda: velocity-independent, about 4.56."""
    return popular_wavelength(config.m_scattered, config.v3, hbar) \
        / de_broglie_length(config)


def isotope_scaling_check(n1: int, n2: int, hbar: float = HBAR):
    """Spectroscopic identity under doubling of the nuclear mass.

    The frequency w(hbar; n1, n2) = (1/(2 hbar^3)) (1/n1^2 - 1/n2^2)
    (m_e = e = 1) evaluated with the doubled-mass 2^(2/3) hbar at (n1, n2)
    must coincide with the original-hbar frequency at (2 n1, 2 n2).
    Returns (lhs, rhs) of that identity.
    """
    if n1 < 1 or n2 < n1:
        raise ValueError("need integer levels n2 >= n1 >= 1")

    def frequency(h: float, lo: int, hi: int) -> float:
        return (1.0 / (2.0 * h**3)) * (1.0 / lo**2 - 1.0 / hi**2)

    lhs = frequency(2.0 ** (2.0 / 3.0) * hbar, n1, n2)
    rhs = frequency(hbar, 2 * n1, 2 * n2)
    return lhs, rhs


def slit_separation_estimate(m: float, v: float, hbar: float = HBAR) -> float:
    """Slit separation for significant scattering: a = hbar/(m v)."""
    if m <= 0.0 or v <= 0.0:
        raise ValueError("mass and speed must be positive")
    return hbar / (m * v)


def bragg_directions(a: float, L: float, n_max: int):
    """Far-zone interference directions a sin(theta) = n L.

    Returns (n, theta) pairs in radians for |n| <= n_max; the forward
    direction n = 0 is always present and orders with |n L / a| > 1 are
    skipped.  Requires the chain period L to not exceed the separation a.
    """
    if a <= 0.0 or L <= 0.0:
        raise ValueError("a and L must be positive")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if L > a:
        raise ValueError(
            f"chain period L={L!r} exceeds slit separation a={a!r}; "
            "the far-zone condition has no first-order solution")
    out = []
    for n in range(-n_max, n_max + 1):
        s = n * L / a
        if abs(s) > 1.0:
            continue
        out.append((n, math.asin(s)))
    return out
