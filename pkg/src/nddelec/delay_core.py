"""Constant-delay scalar DDE/NDDE integrator with breaking-point bookkeeping.

Method of steps with classical RK4.  Steps never straddle a breaking point
(multiples of the delay), delayed values come from cubic-Hermite dense output,
and each node stores one-sided derivatives so jumps can be measured from
polynomial evaluation rather than finite differences.

Retarded problems integrate  dy/dt = F(y(t), y(t - delay)).
Neutral problems integrate   dy/dt = G(y(t), y(t - delay), ydot(t - delay)).
"""

from __future__ import annotations

import inspect
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .trajectory import LEFT, RIGHT, HistoryFunction, _check_side

RETARDED = "retarded"
NEUTRAL = "neutral"

_JUMP_ORDERS = (1, 2, 3, 4)


class IntegrationFailureError(RuntimeError):
    """The right-hand side returned a non-finite value.

    Carries the last good node time and the partial solution up to it.
    """

    def __init__(self, message: str, last_good_time: float,
                 partial: "ScalarSolution") -> None:
        super().__init__(message)
        self.last_good_time = last_good_time
        self.partial = partial


def _rhs_arity(rhs: Callable) -> int:
    try:
        sig = inspect.signature(rhs)
    except (TypeError, ValueError):
        return -1  # uninspectable callable; skip the arity check
    params = [p for p in sig.parameters.values()
              if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)
              and p.default is p.empty]
    return len(params)


@dataclass(frozen=True)
class ScalarDelayProblem:
    """A constant-delay initial value problem on [0, horizon]."""

    kind: str
    rhs: Callable
    history: HistoryFunction
    delay: float = 1.0
    horizon: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (RETARDED, NEUTRAL):
            raise ValueError(f"kind must be '{RETARDED}' or '{NEUTRAL}'")
        if not (self.delay > 0.0 and math.isfinite(self.delay)):
            raise ValueError("delay must be positive and finite")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ValueError("horizon must be positive and finite")
        if not self.history.covers(self.delay):
            raise ValueError(
                f"history domain starts at {self.history.t_min}, "
                f"must cover [-{self.delay}, 0]")
        expected = 2 if self.kind == RETARDED else 3
        arity = _rhs_arity(self.rhs)
        if arity >= 0 and arity != expected:
            raise ValueError(
                f"{self.kind} rhs must take {expected} arguments "
                f"(got {arity})")
        # retarded problems accept a value-only C0 history
        if self.kind == NEUTRAL and self.history.smoothness != "C1":
            raise ValueError("a neutral problem requires a C1 history")


@dataclass(frozen=True)
class BreakingPoint:
    """Measured one-sided derivative jumps at a breaking point.

    ``jumps[k - 1]`` is the order-k jump (right minus left limit) for
    k = 1..4; NaN marks orders whose left-side data is unavailable (a
    non-polynomial history at t = 0).
    """

    t: float
    jumps: tuple

    def jump(self, order: int) -> float:
        if order not in _JUMP_ORDERS:
            raise ValueError("order must be in 1..4")
        return self.jumps[order - 1]


class ScalarSolution:
    """Dense piecewise-cubic solution with one-sided node derivatives."""

    def __init__(self, times, values, m_left, m_right, breaking_points,
                 problem: ScalarDelayProblem, steps_per_delay: int) -> None:
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.m_left = np.asarray(m_left, dtype=float)
        self.m_right = np.asarray(m_right, dtype=float)
        self.breaking_points = tuple(breaking_points)
        self.problem = problem
        self.steps_per_delay = steps_per_delay

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def _segment_coeffs(self, i: int) -> tuple:
        """Cubic coefficients (ascending, local time) of step i.

        Hermite data: left node value and right-derivative, right node value
        and left-derivative.
        """
        h = self.times[i + 1] - self.times[i]
        y0 = self.values[i]
        y1 = self.values[i + 1]
        m0 = self.m_right[i]
        m1 = self.m_left[i + 1]
        c2 = 3.0 * (y1 - y0) / h**2 - (2.0 * m0 + m1) / h
        c3 = 2.0 * (y0 - y1) / h**3 + (m0 + m1) / h**2
        return y0, m0, c2, c3

    def _locate(self, t: float, side: str) -> int:
        if len(self.times) < 2:
            raise ValueError("solution has no completed steps")
        if not (0.0 <= t <= self.horizon):
            raise ValueError(f"t={t!r} outside solution span [0, {self.horizon}]")
        idx = bisect_right(self.times, t) - 1
        if idx >= len(self.times) - 1:
            idx = len(self.times) - 2
        if side == LEFT and idx > 0 and t == self.times[idx]:
            idx -= 1
        return idx

    def __call__(self, t: float, side: str = RIGHT) -> float:
        _check_side(side)
        i = self._locate(t, side)
        c0, c1, c2, c3 = self._segment_coeffs(i)
        tau = t - self.times[i]
        return float(((c3 * tau + c2) * tau + c1) * tau + c0)

    def derivative(self, t: float, order: int = 1, side: str = RIGHT) -> float:
        """One-sided derivative of the dense output (order 1..4)."""
        _check_side(side)
        if order not in _JUMP_ORDERS:
            raise ValueError("order must be in 1..4")
        i = self._locate(t, side)
        # first derivatives at nodes come from the stored one-sided slopes,
        # which are exact rhs evaluations rather than interpolant slopes
        if order == 1 and t == self.times[i] and side == RIGHT:
            return float(self.m_right[i])
        if order == 1 and i + 1 < len(self.times) and t == self.times[i + 1] \
                and side == LEFT:
            return float(self.m_left[i + 1])
        c0, c1, c2, c3 = self._segment_coeffs(i)
        tau = t - self.times[i]
        if order == 1:
            return float((3.0 * c3 * tau + 2.0 * c2) * tau + c1)
        if order == 2:
            return float(6.0 * c3 * tau + 2.0 * c2)
        if order == 3:
            return float(6.0 * c3)
        return 0.0

    def sample(self, ts) -> np.ndarray:
        return np.array([self(t) for t in np.asarray(ts, dtype=float)])

    def rows(self):
        """Node rows (t, y, ydot_left, ydot_right) for tabular output."""
        for i, t in enumerate(self.times):
            yield float(t), float(self.values[i]), float(self.m_left[i]), \
                float(self.m_right[i])


def solve(problem: ScalarDelayProblem,
          steps_per_delay: int = 200) -> ScalarSolution:
    """Integrate by the method of steps with breaking-point-aligned RK4.

    The grid subdivides each delay window separately so no step straddles a
    breaking point.  Delayed lookups at a breaking point resolve to the side
    interior to the window being integrated: the window's trailing edge uses
    the left limit, its leading edge the right limit.
    """
    if steps_per_delay < 2:
        raise ValueError("steps_per_delay must be at least 2")
    tau = problem.delay
    horizon = problem.horizon
    history = problem.history
    neutral = problem.kind == NEUTRAL
    rhs = problem.rhs

    n_windows = int(math.ceil(horizon / tau - 1e-12))
    window_edges = [min(k * tau, horizon) for k in range(n_windows + 1)]
    window_edges[-1] = horizon

    times = [0.0]
    values = [float(history.value(0.0))]
    if history.derivative is not None:
        m_left = [float(history.derivative(0.0))]
    else:
        m_left = [math.nan]
    m_right = [math.nan]  # filled once the first rhs evaluation is available
    breaking_idx = [0]

    # side tolerance for recognizing a delayed query at the window edge
    edge_tol = 1e-9 * tau

    def eval_past(s: float, right_edge: float):
        """One-sided (y, ydot) at delayed time s.

        ``right_edge`` is the delayed image of the current window's end;
        queries there take the left limit, all others the right limit, which
        resolves every lookup into the interior of already-known data.
        """
        side = LEFT if s >= right_edge - edge_tol else RIGHT
        if s < -edge_tol or (abs(s) <= edge_tol and side == LEFT):
            s = min(s, 0.0)
            y = float(history.value(s))
            yd = float(history.derivative(s)) if history.derivative else math.nan
            return y, yd
        s = max(s, 0.0)
        idx = bisect_right(times, s) - 1
        idx = min(max(idx, 0), len(times) - 2)
        if side == RIGHT and idx + 1 < len(times) - 1 \
                and abs(s - times[idx + 1]) <= edge_tol:
            idx += 1  # s sits on node idx+1, use the segment to its right
        elif side == LEFT and idx > 0 and abs(s - times[idx]) <= edge_tol:
            idx -= 1  # s sits on node idx, use the segment to its left
        t0, t1 = times[idx], times[idx + 1]
        h = t1 - t0
        y0, y1 = values[idx], values[idx + 1]
        m0, m1 = m_right[idx], m_left[idx + 1]
        c2 = 3.0 * (y1 - y0) / h**2 - (2.0 * m0 + m1) / h
        c3 = 2.0 * (y0 - y1) / h**3 + (m0 + m1) / h**2
        z = min(max(s - t0, 0.0), h)
        y = ((c3 * z + c2) * z + m0) * z + y0
        yd = (3.0 * c3 * z + 2.0 * c2) * z + m0
        return y, yd

    def call_rhs(y: float, s: float, right_edge: float) -> float:
        past_y, past_yd = eval_past(s, right_edge)
        if neutral:
            out = rhs(y, past_y, past_yd)
        else:
            out = rhs(y, past_y)
        return float(out)

    def fail(message: str) -> IntegrationFailureError:
        partial = _build_solution(times, values, m_left, m_right,
                                  breaking_idx, problem, steps_per_delay,
                                  history)
        return IntegrationFailureError(message, times[-1], partial)

    for w in range(n_windows):
        a, b = window_edges[w], window_edges[w + 1]
        frac = (b - a) / tau
        n_steps = max(1, int(round(steps_per_delay * frac)))
        grid = np.linspace(a, b, n_steps + 1)
        right_edge = b - tau

        # right-side slope at the window's opening node
        y = values[-1]
        m0 = call_rhs(y, a - tau, right_edge)
        if not math.isfinite(m0):
            raise fail(f"non-finite rhs at t={a!r}")
        m_right[-1] = m0

        for i in range(n_steps):
            t0, t1 = float(grid[i]), float(grid[i + 1])
            h = t1 - t0
            k1 = m_right[-1]
            k2 = call_rhs(y + 0.5 * h * k1, t0 + 0.5 * h - tau, right_edge)
            k3 = call_rhs(y + 0.5 * h * k2, t0 + 0.5 * h - tau, right_edge)
            k4 = call_rhs(y + h * k3, t1 - tau, right_edge)
            y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not all(map(math.isfinite, (k2, k3, k4, y_new))):
                raise fail(f"non-finite state in step to t={t1!r}")
            # left slope at t1 uses the same window's delayed side rule
            m_new = call_rhs(y_new, t1 - tau, right_edge)
            if not math.isfinite(m_new):
                raise fail(f"non-finite rhs at t={t1!r}")
            times.append(t1)
            values.append(y_new)
            m_left.append(m_new)
            m_right.append(m_new)  # overwritten at window edges
            y = y_new
        if b < horizon:  # b == (w + 1) * delay: an interior breaking point
            breaking_idx.append(len(times) - 1)

    return _build_solution(times, values, m_left, m_right, breaking_idx,
                           problem, steps_per_delay, history)


def _build_solution(times, values, m_left, m_right, breaking_idx, problem,
                    steps_per_delay, history) -> ScalarSolution:
    sol = ScalarSolution(times, values, m_left, m_right, [], problem,
                         steps_per_delay)
    bps = []
    n = len(times)
    # near-overflow tails of a failed run may push coefficients to inf
    with np.errstate(over="ignore", invalid="ignore"):
        for idx in breaking_idx:
            if idx >= n:
                continue
            t = sol.times[idx]
            jumps = []
            for order in _JUMP_ORDERS:
                right = _right_derivative(sol, idx, order)
                left = _left_derivative(sol, idx, order, history)
                jumps.append(right - left)
            bps.append(BreakingPoint(float(t), tuple(jumps)))
    sol.breaking_points = tuple(bps)
    return sol


def _right_derivative(sol: ScalarSolution, idx: int, order: int) -> float:
    if idx >= len(sol.times) - 1:
        return math.nan
    if order == 1:
        return float(sol.m_right[idx])
    c0, c1, c2, c3 = sol._segment_coeffs(idx)
    if order == 2:
        return 2.0 * c2
    if order == 3:
        return 6.0 * c3
    return 0.0


def _left_derivative(sol: ScalarSolution, idx: int, order: int,
                     history: HistoryFunction) -> float:
    if idx == 0:
        if order == 1:
            if history.derivative is None:
                return math.nan
            return float(history.derivative(0.0))
        if history.derivative_n is None:
            return math.nan
        return float(history.derivative_n(0.0, order))
    if order == 1:
        return float(sol.m_left[idx])
    c0, c1, c2, c3 = sol._segment_coeffs(idx - 1)
    h = sol.times[idx] - sol.times[idx - 1]
    if order == 2:
        return float(6.0 * c3 * h + 2.0 * c2)
    if order == 3:
        return float(6.0 * c3)
    return 0.0


def jump_profile(sol: ScalarSolution, order: int):
    """(breaking point, measured order-k jump) pairs, skipping unknowns.

    Jumps come from one-sided polynomial evaluation of the dense output; an
    entry is skipped when the left-side data at t = 0 is unavailable for the
    requested order (non-polynomial history).
    """
    if order not in _JUMP_ORDERS:
        raise ValueError("order must be in 1..4")
    out = []
    for bp in sol.breaking_points:
        value = bp.jump(order)
        if not math.isnan(value):
            out.append((bp.t, value))
    return out
