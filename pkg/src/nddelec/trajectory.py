"""Piecewise-cubic worldlines with explicit velocity/acceleration jump records.

A worldline is an ordered list of cubic position polynomials in local time.
Position is continuous everywhere (shared-endpoint representation); velocity,
acceleration and jerk may jump at segment boundaries, and every boundary
carries metadata recording the one-sided differences.  Every other module
consumes these worldlines.

Unit system: c = 1, lengths and times share one unit, electron charge is -1.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

LEFT = "left"
RIGHT = "right"

# first derivative order that jumps at a boundary; None means smooth
ORDER_NAMES = {None: "smooth", 1: "velocity", 2: "acceleration", 3: "jerk"}


class DomainError(ValueError):
    """Evaluation time (or solved root) lies outside the covered span."""


class DuplicateBreakpointError(ValueError):
    """The requested time already is a segment boundary."""


class SpeedLimitError(ValueError):
    """A segment's maximum speed reaches the configured limit."""


def as_vec3(value) -> np.ndarray:
    """Validate and return a finite 3-vector as a float ndarray of shape (3,)."""
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def _check_side(side: str) -> str:
    if side not in (LEFT, RIGHT):
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}, got {side!r}")
    return side


class Segment:
    """One cubic piece of a worldline on [t_start, t_end].

    ``coeffs[c][k]`` is the coefficient of ``tau**k`` for spatial component
    ``c``, with ``tau = t - t_start`` the local time.
    """

    __slots__ = ("t_start", "t_end", "coeffs")

    def __init__(self, t_start: float, t_end: float, coeffs) -> None:
        t_start = float(t_start)
        t_end = float(t_end)
        if not (np.isfinite(t_start) and np.isfinite(t_end)):
            raise ValueError("segment times must be finite")
        if not t_start < t_end:
            raise ValueError(f"need t_start < t_end, got [{t_start}, {t_end}]")
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (3, 4):
            raise ValueError(f"coeffs must have shape (3, 4), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        self.t_start = t_start
        self.t_end = t_end
        self.coeffs = arr

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def position(self, tau: float) -> np.ndarray:
        c = self.coeffs
        return ((c[:, 3] * tau + c[:, 2]) * tau + c[:, 1]) * tau + c[:, 0]

    def velocity(self, tau: float) -> np.ndarray:
        c = self.coeffs
        return ((3.0 * c[:, 3]) * tau + 2.0 * c[:, 2]) * tau + c[:, 1]

    def acceleration(self, tau: float) -> np.ndarray:
        c = self.coeffs
        return (6.0 * c[:, 3]) * tau + 2.0 * c[:, 2]

    def jerk(self) -> np.ndarray:
        return 6.0 * self.coeffs[:, 3]

    def max_speed(self) -> float:
        """Exact maximum of |velocity| over the segment.

        |v|^2 is a quartic in local time; its critical points are roots of a
        cubic, so the maximum is found without sampling.
        """
        candidates = [0.0, self.duration]
        speed2 = np.zeros(5)
        for c in self.coeffs:
            vel_poly = np.array([c[1], 2.0 * c[2], 3.0 * c[3]])
            square = npoly.polymul(vel_poly, vel_poly)
            speed2[:square.size] += square
        deriv = npoly.polyder(speed2)
        if np.any(deriv[1:] != 0.0):
            for root in npoly.polyroots(deriv):
                if abs(root.imag) < 1e-12 and 0.0 < root.real < self.duration:
                    candidates.append(root.real)
        worst = max(float(npoly.polyval(tau, speed2)) for tau in candidates)
        return float(np.sqrt(max(worst, 0.0)))

    def shifted_coeffs(self, tau: float) -> np.ndarray:
        """Cubic coefficients rebased to local time origin ``tau``.

        The jerk coefficient is copied and the acceleration coefficient is
        formed as ``c2 + (3*c3)*tau`` so that one-sided acceleration and jerk
        match the parent polynomial bit-for-bit (a split at ``tau`` must not
        manufacture spurious jumps).
        """
        c = self.coeffs
        out = np.empty((3, 4))
        out[:, 0] = self.position(tau)
        out[:, 1] = self.velocity(tau)
        out[:, 2] = c[:, 2] + (3.0 * c[:, 3]) * tau
        out[:, 3] = c[:, 3]
        return out

    def to_dict(self) -> dict:
        return {
            "t0": self.t_start,
            "t1": self.t_end,
            "coeffs": [list(row) for row in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Segment":
        return cls(data["t0"], data["t1"], data["coeffs"])


@dataclass(frozen=True)
class Breakpoint:
    """One-sided jump record at a segment boundary.

    ``order`` is the lowest derivative order that jumps: 1 velocity,
    2 acceleration, 3 jerk; None when the cubics join smoothly.  Position
    never jumps by construction.
    """

    t: float
    order: Optional[int]
    v_jump: np.ndarray
    a_jump: np.ndarray

    @property
    def tag(self) -> str:
        return ORDER_NAMES[self.order]

    @property
    def v_jump_mag(self) -> float:
        return float(np.linalg.norm(self.v_jump))

    @property
    def a_jump_mag(self) -> float:
        return float(np.linalg.norm(self.a_jump))

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "order": self.order,
            "v_jump": list(self.v_jump),
            "a_jump": list(self.a_jump),
        }


# position continuity across boundaries is snapped into the shared-endpoint
# representation below this relative gap; larger gaps are real discontinuities
_CONTINUITY_RTOL = 1e-9


class PiecewiseTrajectory:
    """Sub-luminal worldline made of contiguous cubic segments.

    Immutable after construction; ``insert_breakpoint`` returns a new value.
    The constructor enforces contiguity, exact position continuity (by
    rewriting each segment's constant coefficient to the previous segment's
    endpoint), the speed audit against ``v_max``, and records one-sided jump
    metadata at every interior boundary.
    """

    def __init__(self, segments: Sequence[Segment], mass: float = 1.0,
                 charge: float = -1.0, v_max: float = 0.99) -> None:
        mass = float(mass)
        charge = float(charge)
        v_max = float(v_max)
        if not (np.isfinite(mass) and mass > 0.0):
            raise ValueError("mass must be positive and finite")
        if not np.isfinite(charge):
            raise ValueError("charge must be finite")
        if not (0.0 < v_max < 1.0):
            raise ValueError("v_max must lie strictly between 0 and 1")
        if not segments:
            raise ValueError("need at least one segment")

        chained: list[Segment] = []
        for i, seg in enumerate(segments):
            if not isinstance(seg, Segment):
                seg = Segment.from_dict(seg)
            if i == 0:
                chained.append(seg)
                continue
            prev = chained[-1]
            if seg.t_start != prev.t_end:
                raise ValueError(
                    f"segments not contiguous at t={prev.t_end!r}: "
                    f"next starts at {seg.t_start!r}")
            end_pos = prev.position(prev.duration)
            gap = np.abs(seg.coeffs[:, 0] - end_pos)
            scale = 1.0 + np.abs(end_pos)
            if np.any(gap > _CONTINUITY_RTOL * scale):
                raise ValueError(
                    f"position discontinuity {gap.max():.3e} at t={seg.t_start!r}")
            if np.any(gap != 0.0):
                coeffs = seg.coeffs.copy()
                coeffs[:, 0] = end_pos
                seg = Segment(seg.t_start, seg.t_end, coeffs)
            chained.append(seg)

        for seg in chained:
            top = seg.max_speed()
            if top >= v_max:
                raise SpeedLimitError(
                    f"segment [{seg.t_start}, {seg.t_end}] reaches speed "
                    f"{top:.6g} >= v_max {v_max}")

        self._segments = tuple(chained)
        self._starts = [seg.t_start for seg in chained]
        self.mass = mass
        self.charge = charge
        self.v_max = v_max
        self.breakpoints = tuple(self._measure_breakpoints())

    def _measure_breakpoints(self) -> list[Breakpoint]:
        found = []
        for left, right in zip(self._segments, self._segments[1:]):
            tau = left.duration
            v_jump = right.velocity(0.0) - left.velocity(tau)
            a_jump = right.acceleration(0.0) - left.acceleration(tau)
            j_jump = right.jerk() - left.jerk()
            if np.any(v_jump != 0.0):
                order = 1
            elif np.any(a_jump != 0.0):
                order = 2
            elif np.any(j_jump != 0.0):
                order = 3
            else:
                order = None
            found.append(Breakpoint(right.t_start, order, v_jump, a_jump))
        return found

    @property
    def segments(self) -> tuple:
        return self._segments

    @property
    def t_start(self) -> float:
        return self._segments[0].t_start

    @property
    def t_end(self) -> float:
        return self._segments[-1].t_end

    def _locate(self, t: float, side: str) -> int:
        if not (self.t_start <= t <= self.t_end):
            raise DomainError(
                f"t={t!r} outside trajectory domain "
                f"[{self.t_start!r}, {self.t_end!r}]")
        idx = bisect_right(self._starts, t) - 1
        if idx == len(self._segments):
            idx -= 1
        if side == LEFT and idx > 0 and t == self._starts[idx]:
            idx -= 1
        if idx == len(self._segments) - 1 and t > self._segments[idx].t_end:
            raise DomainError(f"t={t!r} outside trajectory domain")
        return idx

    def eval(self, t: float, side: str = RIGHT):
        """One-sided position, velocity and acceleration at time ``t``.

        At non-boundary times left and right agree; at a boundary the
        requested one-sided limit is returned.
        """
        _check_side(side)
        seg = self._segments[self._locate(t, side)]
        tau = t - seg.t_start
        return seg.position(tau), seg.velocity(tau), seg.acceleration(tau)

    def position(self, t: float, side: str = RIGHT) -> np.ndarray:
        seg = self._segments[self._locate(t, side)]
        return seg.position(t - seg.t_start)

    def velocity(self, t: float, side: str = RIGHT) -> np.ndarray:
        seg = self._segments[self._locate(t, side)]
        return seg.velocity(t - seg.t_start)

    def acceleration(self, t: float, side: str = RIGHT) -> np.ndarray:
        seg = self._segments[self._locate(t, side)]
        return seg.acceleration(t - seg.t_start)

    def position_velocity(self, t: float, side: str = RIGHT):
        seg = self._segments[self._locate(t, side)]
        tau = t - seg.t_start
        return seg.position(tau), seg.velocity(tau)

    def is_boundary(self, t: float, tol: float = 0.0) -> bool:
        """True when ``t`` lies within ``tol`` of an interior boundary."""
        return any(abs(t - bp.t) <= tol for bp in self.breakpoints)

    def insert_breakpoint(self, t: float, new_right_velocity) -> "PiecewiseTrajectory":
        """Split a segment at ``t`` and impose the right-side velocity.

        Position stays continuous; acceleration and jerk to the right are
        inherited from the split polynomial, so passing the existing velocity
        yields a boundary tagged smooth with zero recorded jumps.
        """
        v_new = as_vec3(new_right_velocity)
        if not (self.t_start <= t <= self.t_end):
            raise DomainError(f"t={t!r} outside trajectory domain")
        if t in self._starts or t == self.t_end:
            raise DuplicateBreakpointError(f"t={t!r} already is a boundary")
        idx = self._locate(t, RIGHT)
        seg = self._segments[idx]
        tau = t - seg.t_start
        left = Segment(seg.t_start, t, seg.shifted_coeffs(0.0))
        right_coeffs = seg.shifted_coeffs(tau)
        right_coeffs[:, 1] = v_new
        right = Segment(t, seg.t_end, right_coeffs)
        new_segments = (self._segments[:idx] + (left, right)
                        + self._segments[idx + 1:])
        return PiecewiseTrajectory(new_segments, mass=self.mass,
                                   charge=self.charge, v_max=self.v_max)

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "charge": self.charge,
            "v_max": self.v_max,
            "segments": [seg.to_dict() for seg in self._segments],
            "breakpoints": [bp.to_dict() for bp in self.breakpoints],
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseTrajectory":
        # breakpoint metadata is recomputed from the segments so that the
        # recorded jumps always equal the actual one-sided differences
        return cls(
            [Segment.from_dict(s) for s in data["segments"]],
            mass=data["mass"],
            charge=data["charge"],
            v_max=data.get("v_max", 0.99),
        )

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseTrajectory":
        return cls.from_dict(json.loads(text))


def straight_line(x0, v, t0: float, t1: float, *, mass: float = 1.0,
                  charge: float = -1.0, v_max: float = 0.99) -> PiecewiseTrajectory:
    """Single constant-velocity segment from position ``x0`` at ``t0``."""
    x0 = as_vec3(x0)
    v = as_vec3(v)
    coeffs = np.zeros((3, 4))
    coeffs[:, 0] = x0
    coeffs[:, 1] = v
    return PiecewiseTrajectory([Segment(t0, t1, coeffs)], mass=mass,
                               charge=charge, v_max=v_max)


def static_point(x0, t0: float, t1: float, *, mass: float = 1.0,
                 charge: float = -1.0, v_max: float = 0.99) -> PiecewiseTrajectory:
    """Charge at rest at ``x0`` over [t0, t1]."""
    return straight_line(x0, (0.0, 0.0, 0.0), t0, t1, mass=mass,
                         charge=charge, v_max=v_max)


def piecewise_linear(times: Sequence[float], points, *, mass: float = 1.0,
                     charge: float = -1.0, v_max: float = 0.99) -> PiecewiseTrajectory:
    """Constant-velocity legs visiting ``points[i]`` at ``times[i]``."""
    times = [float(t) for t in times]
    pts = [as_vec3(p) for p in points]
    if len(times) != len(pts):
        raise ValueError("times and points must have equal length")
    if len(times) < 2:
        raise ValueError("need at least two waypoints")
    segments = []
    for i in range(len(times) - 1):
        dt = times[i + 1] - times[i]
        if dt <= 0.0:
            raise ValueError("times must be strictly increasing")
        coeffs = np.zeros((3, 4))
        coeffs[:, 0] = pts[i]
        coeffs[:, 1] = (pts[i + 1] - pts[i]) / dt
        segments.append(Segment(times[i], times[i + 1], coeffs))
    return PiecewiseTrajectory(segments, mass=mass, charge=charge, v_max=v_max)


def ping_pong(center, amplitude, period: float, t0: float, t1: float, *,
              mass: float = 1.0, charge: float = -1.0,
              v_max: float = 0.99) -> PiecewiseTrajectory:
    """Triangle-wave bounce between ``center + amplitude`` and ``center - amplitude``.

    Starts at ``center + amplitude``; one full period returns there.  The leg
    speed is ``4 |amplitude| / period`` and must stay below ``v_max``.
    """
    center = as_vec3(center)
    amplitude = as_vec3(amplitude)
    period = float(period)
    if period <= 0.0:
        raise ValueError("period must be positive")
    if t1 <= t0:
        raise ValueError("need t1 > t0")
    half = period / 2.0
    times = [t0]
    pts = [center + amplitude]
    sign = 1.0
    while times[-1] < t1:
        t_next = times[-1] + half
        sign = -sign
        if t_next >= t1:
            # truncate the final leg at t1
            frac = (t1 - times[-1]) / half
            end = pts[-1] + frac * ((center + sign * amplitude) - pts[-1])
            times.append(t1)
            pts.append(end)
            break
        times.append(t_next)
        pts.append(center + sign * amplitude)
    return piecewise_linear(times, pts, mass=mass, charge=charge, v_max=v_max)


def from_hermite_samples(times: Sequence[float], positions, velocities, *,
                         mass: float = 1.0, charge: float = -1.0,
                         v_max: float = 0.99) -> PiecewiseTrajectory:
    """Cubic Hermite interpolant through sampled positions and velocities.

    Each boundary reuses the previous cubic's endpoint position and velocity
    bit-for-bit, so positions and velocities are exactly continuous and only
    acceleration (order 2) may jump at the sample times.
    """
    times = [float(t) for t in times]
    xs = [as_vec3(p) for p in positions]
    vs = [as_vec3(v) for v in velocities]
    if not (len(times) == len(xs) == len(vs)):
        raise ValueError("times, positions, velocities must have equal length")
    if len(times) < 2:
        raise ValueError("need at least two samples")
    segments = []
    x_start = xs[0]
    v_start = vs[0]
    for i in range(len(times) - 1):
        h = times[i + 1] - times[i]
        if h <= 0.0:
            raise ValueError("times must be strictly increasing")
        x1, v1 = xs[i + 1], vs[i + 1]
        coeffs = np.empty((3, 4))
        coeffs[:, 0] = x_start
        coeffs[:, 1] = v_start
        coeffs[:, 2] = 3.0 * (x1 - x_start) / h**2 - (2.0 * v_start + v1) / h
        coeffs[:, 3] = 2.0 * (x_start - x1) / h**3 + (v_start + v1) / h**2
        seg = Segment(times[i], times[i + 1], coeffs)
        segments.append(seg)
        x_start = seg.position(h)
        v_start = seg.velocity(h)
    return PiecewiseTrajectory(segments, mass=mass, charge=charge, v_max=v_max)


@dataclass(frozen=True)
class HistoryFunction:
    """Initial data on (t_min, 0] for delay integration.

    ``value`` must be defined on the whole domain.  The smoothness tag "C1"
    requires ``derivative``; "C0" histories carry values only.  Where known,
    ``derivative_n(t, k)`` supplies derivatives of order k >= 2 so that jump
    measurement at t = 0 can subtract the history side.
    """

    value: Callable[[float], float]
    derivative: Optional[Callable[[float], float]] = None
    t_min: float = -1.0
    smoothness: str = "C1"
    derivative_n: Optional[Callable[[float, int], float]] = None

    def __post_init__(self) -> None:
        if self.t_min >= 0.0:
            raise ValueError("history domain must extend below 0")
        if self.smoothness not in ("C0", "C1"):
            raise ValueError("smoothness must be 'C0' or 'C1'")
        if self.smoothness == "C1" and self.derivative is None:
            raise ValueError("a C1 history requires a derivative")

    def covers(self, delay: float) -> bool:
        return self.t_min <= -delay

    @classmethod
    def from_polynomial(cls, coeffs: Sequence[float],
                        t_min: float = -1.0) -> "HistoryFunction":
        """Polynomial history (ascending coefficients); all orders available."""
        poly = np.asarray(coeffs, dtype=float)

        def nth(t: float, k: int) -> float:
            return float(npoly.polyval(t, npoly.polyder(poly, k))) if k else \
                float(npoly.polyval(t, poly))

        return cls(
            value=lambda t: nth(t, 0),
            derivative=lambda t: nth(t, 1),
            t_min=t_min,
            smoothness="C1",
            derivative_n=nth,
        )

    @classmethod
    def constant(cls, level: float, t_min: float = -1.0) -> "HistoryFunction":
        return cls.from_polynomial([float(level)], t_min=t_min)
