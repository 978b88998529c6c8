"""Deviating-time solver: analytic roots, residuals, derivative checks.

Hand-worked reference: a charge moving as x_k(s) = (0.5 s, 0, 0) observed
from the origin at t = 1.5 gives the linear equations s = 1.5 - 0.5 s
(retarded root s = 1) and s = 1.5 + 0.5 s (advanced root s = 3), with
d(t_dev)/dt = 2/3 and 2 respectively.
"""

import math

import numpy as np
import pytest

from nddelec.lightcone import (
    ADVANCED,
    RETARDED,
    ConvergenceError,
    LightconeHit,
    SingularityError,
    deviating_derivative,
    solve_lightcone,
)
from nddelec.trajectory import (
    DomainError,
    piecewise_linear,
    static_point,
    straight_line,
)
from trajgen import random_smooth_trajectory


def _drifting_charge():
    # x_k(s) = (0.5 s, 0, 0) on s in [-5, 5]
    return straight_line((-2.5, 0.0, 0.0), (0.5, 0.0, 0.0), t0=-5.0, t1=5.0)


class TestAnalyticRoots:
    def test_static_charge(self):
        traj = static_point((0.0, 0.0, 0.0), t0=0.0, t1=10.0)
        hit = solve_lightcone(traj, (2.0, 0.0, 0.0), 5.0, RETARDED)
        assert hit.t_dev == pytest.approx(3.0, abs=1e-12)
        assert hit.r == pytest.approx(2.0, abs=1e-12)
        assert np.allclose(hit.n, (1.0, 0.0, 0.0), atol=1e-12)
        assert hit.dtdev_dt == 1.0
        assert not hit.on_breakpoint

    def test_drifting_charge_retarded(self):
        hit = solve_lightcone(_drifting_charge(), (0.0, 0.0, 0.0), 1.5,
                              RETARDED)
        assert hit.t_dev == pytest.approx(1.0, abs=1e-12)
        assert hit.r == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(hit.n, (-1.0, 0.0, 0.0), atol=1e-12)
        assert hit.dtdev_dt == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_drifting_charge_advanced(self):
        hit = solve_lightcone(_drifting_charge(), (0.0, 0.0, 0.0), 1.5,
                              ADVANCED)
        assert hit.t_dev == pytest.approx(3.0, abs=1e-12)
        assert hit.r == pytest.approx(1.5, abs=1e-12)
        assert hit.dtdev_dt == pytest.approx(2.0, abs=1e-12)

    def test_branch_swap_under_time_reversal(self):
        # x(s) = (-0.5 s, 0, 0) is the time-reversed drift; observing it at
        # -t swaps the branches and negates the deviating times
        reversed_traj = straight_line((2.5, 0.0, 0.0), (-0.5, 0.0, 0.0),
                                      t0=-5.0, t1=5.0)
        fwd_ret = solve_lightcone(_drifting_charge(), (0.0, 0.0, 0.0), 1.5,
                                  RETARDED)
        fwd_adv = solve_lightcone(_drifting_charge(), (0.0, 0.0, 0.0), 1.5,
                                  ADVANCED)
        rev_adv = solve_lightcone(reversed_traj, (0.0, 0.0, 0.0), -1.5,
                                  ADVANCED)
        rev_ret = solve_lightcone(reversed_traj, (0.0, 0.0, 0.0), -1.5,
                                  RETARDED)
        assert rev_adv.t_dev == pytest.approx(-fwd_ret.t_dev, abs=1e-12)
        assert rev_ret.t_dev == pytest.approx(-fwd_adv.t_dev, abs=1e-12)
        assert rev_adv.r == pytest.approx(fwd_ret.r, abs=1e-12)
        assert rev_ret.r == pytest.approx(fwd_adv.r, abs=1e-12)


class TestBreakpointSide:
    def _kinked(self):
        # speed drop at t=2: (0.5,0,0) before, (0.25,0,0) after
        return piecewise_linear([0.0, 2.0, 4.0],
                                [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                                 (1.5, 0.0, 0.0)])

    def test_retarded_root_on_kink_takes_left_velocity(self):
        hit = solve_lightcone(self._kinked(), (4.0, 0.0, 0.0), 5.0, RETARDED)
        assert hit.t_dev == pytest.approx(2.0, abs=1e-12)
        assert hit.on_breakpoint
        assert np.allclose(hit.v_dev, (0.5, 0.0, 0.0), atol=1e-12)

    def test_advanced_root_on_kink_takes_right_velocity(self):
        hit = solve_lightcone(self._kinked(), (4.0, 0.0, 0.0), -1.0, ADVANCED)
        assert hit.t_dev == pytest.approx(2.0, abs=1e-12)
        assert hit.on_breakpoint
        assert np.allclose(hit.v_dev, (0.25, 0.0, 0.0), atol=1e-12)


class TestErrors:
    def test_root_outside_domain(self):
        traj = static_point((0.0, 0.0, 0.0), t0=0.0, t1=10.0)
        with pytest.raises(DomainError):
            solve_lightcone(traj, (2.0, 0.0, 0.0), 20.0, ADVANCED)
        with pytest.raises(DomainError):
            solve_lightcone(traj, (2.0, 0.0, 0.0), 1.0, RETARDED)

    def test_observation_on_worldline_rejected(self):
        traj = static_point((0.0, 0.0, 0.0), t0=0.0, t1=10.0)
        with pytest.raises(ValueError, match="self-evaluation"):
            solve_lightcone(traj, (0.0, 0.0, 0.0), 5.0, RETARDED)

    def test_unknown_branch_rejected(self):
        traj = static_point((0.0, 0.0, 0.0), t0=0.0, t1=10.0)
        with pytest.raises(ValueError, match="branch"):
            solve_lightcone(traj, (2.0, 0.0, 0.0), 5.0, "sideways")

    def test_singularity_guard(self):
        # manufactured hit whose stored kinematics violate its own speed cap
        hit = LightconeHit(branch=RETARDED, t_dev=0.0, r=1.0,
                           n=np.array([1.0, 0.0, 0.0]),
                           v_dev=np.array([0.96, 0.0, 0.0]),
                           a_dev=np.zeros(3), dtdev_dt=1.0,
                           on_breakpoint=False, v_max=0.5)
        with pytest.raises(SingularityError):
            deviating_derivative(hit, RETARDED)

    def test_deviating_derivative_matches_stored_value(self):
        hit = solve_lightcone(_drifting_charge(), (0.0, 0.0, 0.0), 1.5,
                              RETARDED)
        assert deviating_derivative(hit) == hit.dtdev_dt
        assert deviating_derivative(hit, ADVANCED) == pytest.approx(2.0,
                                                                    abs=1e-12)


class TestRandomizedResiduals:
    def test_residual_tolerance_random_worldlines(self):
        rng = np.random.default_rng(2026_02_11)
        for _ in range(40):
            traj = random_smooth_trajectory(rng, n_segments=10,
                                            speed_scale=0.5,
                                            dt_range=(0.5, 1.0))
            for _ in range(50):
                t = rng.uniform(traj.t_start + 2.0, traj.t_end - 2.0)
                x = traj.position(t) + rng.uniform(-0.5, 0.5, size=3)
                for branch in (RETARDED, ADVANCED):
                    hit = solve_lightcone(traj, x, t, branch)
                    sgn = 1.0 if branch == ADVANCED else -1.0
                    residual = hit.t_dev - t - sgn * hit.r
                    assert abs(residual) <= 1e-12 * (1.0 + abs(t))
                    assert abs(np.linalg.norm(hit.n) - 1.0) <= 1e-12
                    d = np.linalg.norm(traj.position(hit.t_dev) - x)
                    assert abs(hit.r - d) <= 1e-12 * (1.0 + d)

    def test_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        traj = random_smooth_trajectory(rng, n_segments=10, speed_scale=0.5,
                                        dt_range=(0.5, 1.0))
        eps = 1e-5
        for _ in range(60):
            t = rng.uniform(traj.t_start + 2.0, traj.t_end - 2.0)
            x = traj.position(t) + rng.uniform(-0.5, 0.5, size=3)
            for branch in (RETARDED, ADVANCED):
                hit = solve_lightcone(traj, x, t, branch)
                lo = solve_lightcone(traj, x, t - eps, branch,
                                     initial_guess=hit.t_dev)
                hi = solve_lightcone(traj, x, t + eps, branch,
                                     initial_guess=hit.t_dev)
                fd = (hi.t_dev - lo.t_dev) / (2.0 * eps)
                assert hit.dtdev_dt == pytest.approx(fd, abs=1e-6)

    def test_warm_start_agrees_with_cold_start(self):
        rng = np.random.default_rng(11)
        traj = random_smooth_trajectory(rng, n_segments=8, speed_scale=0.4)
        t = 0.5 * (traj.t_start + traj.t_end)
        x = traj.position(t) + np.array([0.3, -0.2, 0.1])
        cold = solve_lightcone(traj, x, t, RETARDED)
        warm = solve_lightcone(traj, x, t, RETARDED,
                               initial_guess=cold.t_dev + 0.3)
        assert warm.t_dev == pytest.approx(cold.t_dev, abs=1e-13)
