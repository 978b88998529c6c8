"""End-to-end acceptance gates, one pass/fail line per criterion.

Each test checks one headline property of the library at its contractual
tolerance, times itself against a runtime budget, and prints a single
``[PASS]``/``[FAIL]`` line (visible with ``pytest -s``).
"""

import math
import time

import numpy as np

from nddelec import (
    DiscontinuityEvent,
    FourierPotential,
    HistoryFunction,
    Lattice,
    ScalarDelayProblem,
    SlitConfig,
    chain_spacings,
    de_broglie_length,
    de_broglie_ratio,
    dressed_launch_momentum,
    from_hermite_samples,
    integrate,
    isotope_scaling_check,
    kick_ensemble,
    piecewise_linear,
    propagate_chain,
    recoil_factor,
    solve,
    solve_lightcone,
    static_point,
    straight_line,
    vonlaue_shift,
)
from nddelec.crystal import first_order_residual
from nddelec.farfield import fields_from_hit, simple_from_hit

TWO_PI = 2.0 * math.pi


def _gate(label: str, budget: float, started: float, checks) -> None:
    """Print one verdict line and fail the test if any check failed."""
    elapsed = time.perf_counter() - started
    failed = [name for name, ok in checks if not ok]
    if elapsed >= budget:
        failed.append(f"runtime {elapsed:.2f}s over {budget:g}s budget")
    verdict = "PASS" if not failed else "FAIL"
    print(f"[{verdict}] {label} ({elapsed:.2f}s)")
    assert not failed, f"{label}: {failed}"


def _smooth_worldline():
    """Sub-luminal accelerating worldline for randomized field checks."""
    times = np.linspace(-60.0, 60.0, 481)
    pos = [(0.3 * math.sin(0.11 * t), 0.9 * math.sin(0.21 * t),
            0.2 * math.cos(0.17 * t)) for t in times]
    vel = [(0.3 * 0.11 * math.cos(0.11 * t), 0.9 * 0.21 * math.cos(0.21 * t),
            -0.2 * 0.17 * math.sin(0.17 * t)) for t in times]
    return from_hermite_samples(times, pos, vel)


def test_01_retarded_jump_smooths_after_one_delay():
    started = time.perf_counter()
    problem = ScalarDelayProblem(kind="retarded",
                                 rhs=lambda y, yd: -yd,
                                 history=HistoryFunction.constant(1.0),
                                 delay=1.0, horizon=2.5)
    sol = solve(problem)
    point = next(b for b in sol.breaking_points if abs(b.t - 1.0) < 1e-12)
    _gate("1 smoothing: order-1 jump < 1e-9 at t=1, order-2 jump = 1 +- 1e-6",
          1.0, started,
          [("order-1 jump gone", abs(point.jump(1)) < 1e-9),
           ("order-2 jump is 1", abs(point.jump(2) - 1.0) <= 1e-6)])


def test_02_neutral_jumps_follow_geometric_ladder():
    started = time.perf_counter()
    checks = []
    for a in (0.5, -0.8):
        problem = ScalarDelayProblem(
            kind="neutral",
            rhs=lambda y, yd, ydotd, a=a: a * ydotd,
            history=HistoryFunction.from_polynomial((0.0, 1.0), t_min=-1.0),
            delay=1.0, horizon=7.2)
        sol = solve(problem)
        j0 = a - 1.0  # slope jump seeded at t=0 by h(t) = t
        by_time = {round(b.t): b for b in sol.breaking_points}
        for n in range(7):
            expected = a ** n * j0
            rel = abs(by_time[n].jump(1) - expected) / abs(expected)
            checks.append((f"a={a} n={n}", rel <= 1e-9))
    _gate("2 persistence: order-1 jumps equal a^n J0 (rel 1e-9, n <= 6)",
          1.0, started, checks)


def test_03_lightcone_analytic_roots_and_time_derivative():
    started = time.perf_counter()
    # x(t) = 0.5 t on the x axis, observed from the origin at t = 1.5
    mover = straight_line((-5.0, 0.0, 0.0), (0.5, 0.0, 0.0), -10.0, 10.0)
    t_minus = solve_lightcone(mover, (0, 0, 0), 1.5, "retarded").t_dev
    t_plus = solve_lightcone(mover, (0, 0, 0), 1.5, "advanced").t_dev
    checks = [("t- = 1", abs(t_minus - 1.0) <= 1e-12),
              ("t+ = 3", abs(t_plus - 3.0) <= 1e-12)]

    traj = _smooth_worldline()
    rng = np.random.default_rng(20260825)
    step = 1e-5
    worst = 0.0
    for k in range(10_000):
        point = rng.uniform(-4.0, 4.0, 3) + np.array([7.0, 0.0, 0.0])
        t = rng.uniform(-20.0, 20.0)
        branch = "retarded" if k % 2 == 0 else "advanced"
        hit = solve_lightcone(traj, point, t, branch)
        fd = (solve_lightcone(traj, point, t + step, branch).t_dev
              - solve_lightcone(traj, point, t - step, branch).t_dev) \
            / (2.0 * step)
        worst = max(worst, abs(fd - hit.dtdev_dt))
    checks.append(("dtdev/dt matches FD on 1e4 samples", worst <= 1e-6))
    _gate("3 lightcone: analytic roots 1e-12, derivative vs FD 1e-6",
          5.0, started, checks)


def test_04_far_field_formulas_agree_and_vanish_without_acceleration():
    started = time.perf_counter()
    traj = _smooth_worldline()
    rng = np.random.default_rng(40)
    worst = 0.0
    for k in range(10_000):
        point = rng.uniform(-4.0, 4.0, 3) + np.array([6.0, 0.0, 0.0])
        t = rng.uniform(-20.0, 20.0)
        branch = "retarded" if k % 2 == 0 else "advanced"
        hit = solve_lightcone(traj, point, t, branch)
        e_full, b_full = fields_from_hit(hit, traj.charge)
        e_simple, b_simple = simple_from_hit(hit, traj.charge)
        worst = max(worst,
                    float(np.max(np.abs(e_full - e_simple))),
                    float(np.max(np.abs(b_full - b_simple))))
    checks = [("two field forms agree on 1e4 samples", worst <= 1e-9)]

    coaster = piecewise_linear([-30.0, 0.0, 30.0],
                               [(-12.0, 0.0, 0.0), (0.0, 0.0, 0.0),
                                (12.0, 0.0, 0.0)])
    all_zero = True
    for k in range(200):
        point = rng.uniform(-3.0, 3.0, 3) + np.array([0.0, 5.0, 0.0])
        t = rng.uniform(-4.0, 4.0)
        branch = "retarded" if k % 2 == 0 else "advanced"
        hit = solve_lightcone(coaster, point, t, branch)
        e_field, b_field = fields_from_hit(hit, traj.charge)
        if np.any(e_field != 0.0) or np.any(b_field != 0.0):
            all_zero = False
    checks.append(("constant-velocity far fields identically zero",
                   all_zero))
    _gate("4 far fields: formula agreement 1e-9, zero without acceleration",
          10.0, started, checks)


def test_05_sewing_chain_spacings():
    started = time.perf_counter()
    # static pair at separation r = 3: same-trajectory returns every 2r
    rest = [static_point((0.0, 0.0, 0.0), -1e4, 1e4),
            static_point((3.0, 0.0, 0.0), -1e4, 1e4)]
    chain = propagate_chain(rest, DiscontinuityEvent(0, 0.0, 0), 1, 10)
    spacings = np.asarray(chain_spacings(chain))
    checks = [("static spacing = 2r",
               float(np.max(np.abs(spacings - 6.0))) <= 1e-12)]

    movers = [straight_line((-5.0, 0.0, 0.0), (0.03, 0.0, 0.0), -10.0, 160.0),
              straight_line((5.0, 0.0, 0.0), (-0.03, 0.0, 0.0), -10.0, 160.0)]
    chain = propagate_chain(movers, DiscontinuityEvent(0, 0.0, 0), 1, 12)
    hops = np.diff(chain.times())
    checks.append(("approaching hops monotone decreasing",
                   bool(np.all(np.diff(hops) < 0.0))))

    # symmetric deceleration to rest at separation a = 0.5
    separation = 0.5
    left = piecewise_linear([-100.0, 0.0, 400.0],
                            [(-5.0, 0.0, 0.0), (-0.25, 0.0, 0.0),
                             (-0.25, 0.0, 0.0)])
    right = piecewise_linear([-100.0, 0.0, 400.0],
                             [(5.0, 0.0, 0.0), (0.25, 0.0, 0.0),
                              (0.25, 0.0, 0.0)])
    chain = propagate_chain([left, right],
                            DiscontinuityEvent(0, -30.0, 0), 1, 25)
    final_hop = float(np.diff(chain.times())[-1])
    checks.append(("central hops converge to the rest separation",
                   abs(final_hop - separation) / separation <= 0.01))
    _gate("5 sewing: 2r static, decreasing while approaching, limit = a",
          10.0, started, checks)


def test_06_de_broglie_pipeline_anchors():
    started = time.perf_counter()
    factor = recoil_factor(1836.15267)
    checks = [("recoil factor in [188.8, 189.0]", 188.8 <= factor <= 189.0)]
    speeds = (0.001, 0.003, 0.01, 0.03, 0.1, 0.3)
    products = []
    for v3 in speeds:
        config = SlitConfig(a=1.0, v3=v3, mass_ratio=1836.15267)
        products.append(de_broglie_length(config) * config.m_scattered * v3)
    spread = (max(products) - min(products)) / products[0]
    checks.append(("lambda * m * |v| constant to 1e-12", spread <= 1e-12))
    ratio = de_broglie_ratio(SlitConfig(a=1.0, v3=0.01,
                                        mass_ratio=1836.15267))
    checks.append(("popular/characteristic ratio = 4.56 +- 0.1",
                   abs(ratio - 4.56) <= 0.1))
    _gate("6 pipeline: recoil 188.9, invariant length product, ratio 4.56",
          1.0, started, checks)


def test_07_isotope_frequency_identity():
    started = time.perf_counter()
    worst = 0.0
    for n2 in range(2, 51):
        for n1 in range(1, n2):
            lhs, rhs = isotope_scaling_check(n1, n2)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    _gate("7 isotope: doubled-mass line identity (rel 1e-13, n2 <= 50)",
          1.0, started, [("all levels", worst <= 1e-13)])


def test_08_canonical_cancellation_and_near_free_motion():
    started = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        n_pairs = int(rng.integers(1, 4))
        gs, vs = [], []
        for _ in range(n_pairs):
            g = rng.uniform(-8.0, 8.0, 2)
            coeff = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
            gs.extend([g, -g])
            vs.extend([coeff, coeff.conjugate()])
        pot = FourierPotential(Gs=np.array(gs), Vs=np.array(vs),
                               epsilon=float(10.0 ** rng.uniform(-3, -1.3)))
        momentum = rng.uniform(-3.0, 3.0, 2)
        while min(abs(float(g @ momentum)) for g in pot.Gs) < 1e-3:
            momentum = rng.uniform(-3.0, 3.0, 2)
        worst = max(worst, first_order_residual(pot, momentum))
    checks = [("first-order residual <= 1e-14 on 100 draws",
               worst <= 1e-14)]

    x0 = np.array([0.1, 0.2])
    p0 = np.array([1.07, 0.53])
    cs = []
    for eps in (0.01, 0.005):
        pot = FourierPotential.single_pair((TWO_PI, 0.0), 0.7 + 0.3j, eps)
        launch = dressed_launch_momentum(pot, x0, p0)
        traj = integrate(pot, x0, launch, T=1.0 / eps, sample_every=5)
        line = x0[None, :] + traj.times[:, None] * p0[None, :]
        dev = float(np.max(np.linalg.norm(traj.positions - line, axis=1)))
        cs.append(dev / eps)
    checks.append(("deviation/epsilon stable under halving",
                   0.5 <= cs[1] / cs[0] <= 2.0))
    _gate("8 crystal: residual 1e-14, near-free motion with stable C",
          30.0, started, checks)


def test_09_resonant_kick_alignment_bound_and_pendulum_frequency():
    started = time.perf_counter()
    pot = FourierPotential.single_pair((TWO_PI, 0.0), 1.0, 0.01)
    bound = math.sqrt(4.0 * 0.01 * 1.0)
    runs = kick_ensemble(pot, (0.0, 1.0), n_runs=24, seed=20260825,
                         workers=1)
    checks = [
        ("kick aligned with G0 (cos >= 1 - 1e-12)",
         all(r.report.alignment >= 1.0 - 1e-12 for r in runs)),
        ("kick within separatrix bound",
         all(r.report.magnitude <= bound * (1.0 + 1e-6) for r in runs)),
    ]

    # small oscillation about the potential minimum of the resonant pendulum
    theta0 = math.pi + 0.12
    traj = integrate(pot, (theta0 / TWO_PI, 0.0), (0.0, 0.0), T=80.0)
    px = traj.momenta[:, 0]
    crossings = []
    for i in range(1, len(px)):
        if px[i - 1] < 0.0 <= px[i]:
            frac = -px[i - 1] / (px[i] - px[i - 1])
            crossings.append(traj.times[i - 1]
                             + frac * (traj.times[i] - traj.times[i - 1]))
    measured = TWO_PI / float(np.mean(np.diff(crossings)))
    expected = math.sqrt(2.0 * 0.01 * 1.0) * TWO_PI
    checks.append(("pendulum frequency matches linearization within 1%",
                   abs(measured - expected) / expected <= 0.01))
    _gate("9 kick: alignment 1e-12, bound sqrt(4 eps |V|), frequency 1%",
          60.0, started, checks)


def test_10_von_laue_shift_lands_on_the_lattice():
    started = time.perf_counter()
    lattice = Lattice.square(1.3)
    period = 0.85
    beam = (0.37, 0.93)
    basis = lattice.basis
    sites = [i * basis[0] + j * basis[1]
             for i in range(-10, 10) for j in range(-10, 10)]
    worst = 0.0
    for g in lattice.reciprocal_vectors(n_max=2, include_zero=True):
        du = vonlaue_shift(period, beam, g)
        for site in sites:
            value = float(du @ site)
            worst = max(worst,
                        abs(value - period * round(value / period)))
    _gate("10 von Laue: du . dr = n L on a 20x20 patch (1e-10)",
          5.0, started, [("every site, |n| <= 2 reciprocal patch",
                          worst <= 1e-10)])
