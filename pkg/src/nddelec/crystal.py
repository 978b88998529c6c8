"""Periodic-potential Hamiltonian scattering in two and three dimensions.

A point particle crosses a weak periodic potential written as a finite
Fourier series over reciprocal-lattice vectors,

    H = |p|^2 / 2 + eps * sum_G V_G exp(i G.x),    V_{-G} = conj(V_G),

with the reality condition making the potential real.  For generic momenta
a quasi-identity canonical transformation with coefficients

    F_G = -i V_G / (G.P)

removes the potential to first order in eps, so the beam passes straight
through for times of order 1/eps^2.  When the momentum is perpendicular to
some reciprocal vector G0 that term cannot be removed; the surviving
dynamics is a pendulum along G0,

    H = |P|^2 / 2 + 2 eps |V_G0| cos(G0.x),
    dP/dt = 2 eps |V_G0| sin(G0.x) G0,

and the particle picks up momentum kicks parallel to G0 whose size is
bounded by the separatrix excursion sqrt(4 eps |V_G0|).  A delayed-signal
variant of the same geometry selects outgoing direction changes

    du = (L |u| / 2 pi) G

so that the per-site signal delays du . dr_j are integer multiples of the
period L on every lattice translation dr_j.

Units: particle mass 1, speed of light 1.

Contents:
    Lattice                  direct + reciprocal basis, b_i.a_j = 2 pi d_ij
    FourierPotential         finite real Fourier series with prefactor eps
    hamiltonian              energy of a phase-space point
    potential_force          -grad of the potential term (real by pairing)
    generating_coefficients  F_G map with resonant vectors excluded
    first_order_residual     max |V_G + i (G.P) F_G| over the support
    resonance_set            patch vectors perpendicular to a momentum
    integrate                velocity-Verlet sampling of (x, p, H)
    momentum_kick            run's delta-p, alignment, separatrix bound
    kick_ensemble            seeded sweep over initial phases, parallel
    vonlaue_shift            direction change (L / 2 pi) G of a unit beam
    vonlaue_residual         site delays vs integer multiples of L
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .delay_core import IntegrationFailureError

TWO_PI = 2.0 * math.pi


class _NonFiniteState(Exception):
    """Internal marker: integration state left the finite floats."""


def _integer_combinations(rows: np.ndarray, n_max: int,
                          include_zero: bool) -> np.ndarray:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    d = rows.shape[0]
    axes = [np.arange(-n_max, n_max + 1)] * d
    coeffs = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    coeffs = coeffs.reshape(-1, d)
    if not include_zero:
        coeffs = coeffs[np.any(coeffs != 0, axis=1)]
    return coeffs.astype(float) @ rows


@dataclass(frozen=True, eq=False)
class Lattice:
    """Direct basis (rows a_i) and the reciprocal basis it induces.

    The reciprocal rows b_i satisfy b_i . a_j = 2 pi delta_ij; the
    constructor verifies the identity to 1e-12 after building
    B = 2 pi inv(A)^T.
    """

    basis: np.ndarray
    reciprocal: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        a = np.array(self.basis, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("basis must be a square matrix of row vectors")
        if a.shape[0] not in (2, 3):
            raise ValueError("only 2D and 3D lattices are supported")
        if not np.all(np.isfinite(a)):
            raise ValueError("basis entries must be finite")
        scale = float(np.max(np.abs(a)))
        if abs(np.linalg.det(a)) <= 1e-12 * max(1.0, scale) ** a.shape[0]:
            raise ValueError("basis vectors are (nearly) linearly dependent")
        b = TWO_PI * np.linalg.inv(a).T
        object.__setattr__(self, "basis", a)
        object.__setattr__(self, "reciprocal", b)
        gram = b @ a.T - TWO_PI * np.eye(a.shape[0])
        tol = 1e-12 * max(1.0, scale * float(np.max(np.abs(b))))
        if float(np.max(np.abs(gram))) > tol:
            raise ValueError("reciprocal basis failed the duality check")

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    def reciprocal_vectors(self, n_max: int = 1,
                           include_zero: bool = False) -> np.ndarray:
        """Integer combinations of reciprocal rows with |m_i| <= n_max."""
        return _integer_combinations(self.reciprocal, n_max, include_zero)

    def translations(self, n_max: int = 1,
                     include_zero: bool = True) -> np.ndarray:
        """Integer combinations of direct rows with |m_i| <= n_max."""
        return _integer_combinations(self.basis, n_max, include_zero)

    @staticmethod
    def square(a: float = 1.0) -> "Lattice":
        return Lattice(a * np.eye(2))

    @staticmethod
    def cubic(a: float = 1.0) -> "Lattice":
        return Lattice(a * np.eye(3))


def _neg_key(key: Tuple[float, ...]) -> Tuple[float, ...]:
    return tuple(-g for g in key)


def _lex_nonnegative(key: Tuple[float, ...]) -> bool:
    for g in key:
        if g > 0.0:
            return True
        if g < 0.0:
            return False
    return True


@dataclass(frozen=True, eq=False)
class FourierPotential:
    """Finite Fourier series eps * sum_G V_G exp(i G.x), real-valued.

    Terms are supplied as parallel arrays of reciprocal vectors and complex
    coefficients; every +G row must be matched by a -G row carrying the
    conjugate coefficient (checked to 1e-12), which keeps the potential and
    its gradient real.  A G = 0 row is allowed as a constant energy offset
    and must have a real coefficient.
    """

    Gs: np.ndarray
    Vs: np.ndarray
    epsilon: float
    _pairs: Tuple[Tuple[Tuple[float, ...], float, float], ...] = field(
        init=False, repr=False)
    _v0: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        gs = np.atleast_2d(np.array(self.Gs, dtype=float))
        vs = np.atleast_1d(np.array(self.Vs, dtype=complex))
        if gs.ndim != 2 or gs.shape[1] not in (2, 3):
            raise ValueError("reciprocal vectors must be 2D or 3D rows")
        if vs.shape != (gs.shape[0],):
            raise ValueError("need exactly one coefficient per vector")
        if not (np.all(np.isfinite(gs)) and np.all(np.isfinite(vs))):
            raise ValueError("potential data must be finite")
        eps = float(self.epsilon)
        if not math.isfinite(eps) or eps < 0.0:
            raise ValueError("epsilon must be a finite non-negative real")

        table: Dict[Tuple[float, ...], complex] = {}
        for row, coeff in zip(gs, vs):
            key = tuple(float(g) for g in row)
            if key in table:
                raise ValueError(f"duplicate reciprocal vector {key}")
            table[key] = complex(coeff)

        pairs: List[Tuple[Tuple[float, ...], float, float]] = []
        v0 = 0.0
        seen = set()
        for key, coeff in table.items():
            if key in seen:
                continue
            neg = _neg_key(key)
            if neg not in table:
                raise ValueError(
                    f"vector {key} has no -G partner; potential is not real")
            mismatch = abs(table[neg] - coeff.conjugate())
            if mismatch > 1e-12 * max(1.0, abs(coeff)):
                raise ValueError(
                    f"coefficient at {neg} is not the conjugate of the one "
                    f"at {key}; potential is not real")
            if neg == key:
                v0 += coeff.real
                seen.add(key)
                continue
            rep = key if _lex_nonnegative(key) else neg
            rep_v = table[rep]
            pairs.append((rep, rep_v.real, rep_v.imag))
            seen.add(key)
            seen.add(neg)

        object.__setattr__(self, "Gs", gs)
        object.__setattr__(self, "Vs", vs)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "_pairs", tuple(pairs))
        object.__setattr__(self, "_v0", v0)

    @property
    def dimension(self) -> int:
        return self.Gs.shape[1]

    def pairs(self) -> Tuple[Tuple[Tuple[float, ...], float, float], ...]:
        """One representative (G, Re V_G, Im V_G) per +-G pair."""
        return self._pairs

    def constant_coefficient(self) -> float:
        """Real coefficient of the G = 0 term (0 if absent)."""
        return self._v0

    def dominant_pair(self) -> Tuple[np.ndarray, complex]:
        """Representative of the nonzero pair with the least |G|."""
        if not self._pairs:
            raise ValueError("potential has no nonzero reciprocal vectors")
        best = min(self._pairs,
                   key=lambda item: (math.hypot(*item[0]) if len(item[0]) == 2
                                     else math.sqrt(sum(g * g
                                                        for g in item[0])),
                                     item[0]))
        key, vr, vi = best
        return np.array(key), complex(vr, vi)

    @staticmethod
    def single_pair(G: Sequence[float], V: complex,
                    epsilon: float) -> "FourierPotential":
        g = np.asarray(G, dtype=float)
        v = complex(V)
        return FourierPotential(np.stack([g, -g]),
                                np.array([v, v.conjugate()]), epsilon)


def hamiltonian(p: Sequence[float], x: Sequence[float],
                pot: FourierPotential) -> float:
    """Energy |p|^2 / 2 + eps * sum_G V_G exp(i G.x) of a phase point.

    The complex sum is evaluated as written; the reality pairing makes its
    imaginary part cancel, which is verified to 1e-14 before dropping it.
    """
    p_arr = np.asarray(p, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if p_arr.shape != (pot.dimension,) or x_arr.shape != (pot.dimension,):
        raise ValueError("p and x must match the potential dimension")
    total = complex(0.0, 0.0)
    for row, coeff in zip(pot.Gs, pot.Vs):
        total += coeff * np.exp(1j * float(row @ x_arr))
    value = 0.5 * float(p_arr @ p_arr) + pot.epsilon * total
    if abs(value.imag) > 1e-14 * max(1.0, abs(value.real)):
        raise ValueError("potential sum failed to be real")
    return float(value.real)


def potential_force(pot: FourierPotential, x: Sequence[float]) -> np.ndarray:
    """Force -grad of the potential term, summed pairwise so it is real.

    Each +-G pair contributes 2 eps Im(V_G exp(i G.x)) G, a scalar multiple
    of its reciprocal vector.
    """
    x_arr = np.asarray(x, dtype=float)
    if x_arr.shape != (pot.dimension,):
        raise ValueError("x must match the potential dimension")
    force = np.zeros(pot.dimension)
    two_eps = 2.0 * pot.epsilon
    for key, vr, vi in pot.pairs():
        theta = 0.0
        for g, xk in zip(key, x_arr):
            theta += g * float(xk)
        s = two_eps * (vr * math.sin(theta) + vi * math.cos(theta))
        force += s * np.array(key)
    return force


@dataclass(frozen=True, eq=False)
class GeneratingCoefficients:
    """Map G -> F_G of the momentum-removing transform, plus exclusions."""

    coefficients: Dict[Tuple[float, ...], complex]
    resonant: Tuple[np.ndarray, ...]


def generating_coefficients(pot: FourierPotential, P: Sequence[float],
                            resonance_tol: float = 1e-12,
                            ) -> GeneratingCoefficients:
    """Coefficients F_G = -i V_G / (G.P) for every non-resonant term.

    Vectors with |G.P| <= resonance_tol |G||P| cannot be removed; they are
    excluded from the map and reported in the resonant tuple.  The G = 0
    term is a constant and is never included.
    """
    p_arr = np.asarray(P, dtype=float)
    if p_arr.shape != (pot.dimension,):
        raise ValueError("P must match the potential dimension")
    p_norm = float(np.linalg.norm(p_arr))
    coeffs: Dict[Tuple[float, ...], complex] = {}
    resonant: List[np.ndarray] = []
    for row, coeff in zip(pot.Gs, pot.Vs):
        g_norm = float(np.linalg.norm(row))
        if g_norm == 0.0:
            continue
        gp = float(row @ p_arr)
        if abs(gp) <= resonance_tol * g_norm * p_norm:
            resonant.append(np.array(row))
        else:
            coeffs[tuple(float(g) for g in row)] = -1j * complex(coeff) / gp
    return GeneratingCoefficients(coeffs, tuple(resonant))


def first_order_residual(pot: FourierPotential, P: Sequence[float],
                         coefficients: Optional[Union[
                             GeneratingCoefficients,
                             Mapping[Tuple[float, ...], complex]]] = None,
                         resonance_tol: float = 1e-12) -> float:
    """Size max_G |V_G - i (G.P) F_G| of the surviving first-order term.

    With the default coefficients F_G = -i V_G/(G.P) this is zero to
    round-off whenever P is non-resonant; missing map entries count as
    F_G = 0, so their terms survive with weight |V_G|.
    """
    p_arr = np.asarray(P, dtype=float)
    if coefficients is None:
        coefficients = generating_coefficients(pot, p_arr, resonance_tol)
    if isinstance(coefficients, GeneratingCoefficients):
        table = coefficients.coefficients
    else:
        table = dict(coefficients)
    worst = 0.0
    for row, coeff in zip(pot.Gs, pot.Vs):
        if float(np.linalg.norm(row)) == 0.0:
            continue
        gp = float(row @ p_arr)
        f = table.get(tuple(float(g) for g in row), complex(0.0, 0.0))
        worst = max(worst, abs(complex(coeff) - 1j * gp * f))
    return worst


def dressed_launch_momentum(pot: FourierPotential, x: Sequence[float],
                            P: Sequence[float],
                            resonance_tol: float = 1e-12) -> np.ndarray:
    """Launch momentum whose first-order mean momentum equals P.

    The transform that straightens the motion maps
    p = P - eps * sum_G G V_G exp(iG.x)/(G.P); launching from x with this p
    makes the run's average velocity P to first order, so the trajectory
    hugs the line x + P t instead of drifting away from it secularly.
    Resonant vectors contribute no correction and are skipped.
    """
    x_arr = np.asarray(x, dtype=float)
    p_arr = np.asarray(P, dtype=float)
    if x_arr.shape != (pot.dimension,) or p_arr.shape != (pot.dimension,):
        raise ValueError("x and P must match the potential dimension")
    p_norm = float(np.linalg.norm(p_arr))
    launch = p_arr.copy()
    for key, vr, vi in pot.pairs():
        g = np.array(key)
        gp = float(g @ p_arr)
        if abs(gp) <= resonance_tol * float(np.linalg.norm(g)) * p_norm:
            continue
        theta = float(g @ x_arr)
        re_part = vr * math.cos(theta) - vi * math.sin(theta)
        launch -= (2.0 * pot.epsilon * re_part / gp) * g
    return launch


def resonance_set(lattice: Lattice, P: Sequence[float], tol: float = 1e-12,
                  n_max: int = 2) -> List[np.ndarray]:
    """Patch vectors (|m_i| <= n_max, G != 0) with |G.P| <= tol |G||P|."""
    p_arr = np.asarray(P, dtype=float)
    if p_arr.shape != (lattice.dimension,):
        raise ValueError("P must match the lattice dimension")
    p_norm = float(np.linalg.norm(p_arr))
    hits = []
    for row in lattice.reciprocal_vectors(n_max=n_max, include_zero=False):
        g_norm = float(np.linalg.norm(row))
        if abs(float(row @ p_arr)) <= tol * g_norm * p_norm:
            hits.append(np.array(row))
    return hits


@dataclass(frozen=True, eq=False)
class CrystalTrajectory:
    """Sampled (t, x, p, H) rows of one velocity-Verlet run."""

    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    energies: np.ndarray
    dt: float
    pot: FourierPotential

    def __len__(self) -> int:
        return self.times.shape[0]


def _pair_energy(pairs, v0: float, eps: float, x: Sequence[float]) -> float:
    total = v0
    for key, vr, vi in pairs:
        theta = 0.0
        for g, xk in zip(key, x):
            theta += g * xk
        total += 2.0 * (vr * math.cos(theta) - vi * math.sin(theta))
    return eps * total


def _default_dt(pot: FourierPotential, p0: np.ndarray) -> float:
    """1/200 of the shortest potential period seen along the run.

    Candidate periods: the crossing time of each spatial period 2 pi / |G|
    at the launch speed, and the small-oscillation pendulum period
    2 pi / sqrt(2 eps |V_G| |G|^2) of each pair.
    """
    speed = float(np.linalg.norm(p0))
    scales: List[float] = []
    for key, vr, vi in pot.pairs():
        g_norm = math.sqrt(sum(g * g for g in key))
        if speed > 0.0:
            scales.append(TWO_PI / (g_norm * speed))
        w2 = 2.0 * pot.epsilon * math.hypot(vr, vi) * g_norm * g_norm
        if w2 > 0.0:
            scales.append(TWO_PI / math.sqrt(w2))
    if not scales:
        raise ValueError("no intrinsic time scale (free motion); pass dt")
    return min(scales) / 200.0


def _steps_generic(pairs, v0, eps, x_list, p_list, dt, n_steps,
                   sample_every):
    d = len(x_list)
    ks = range(d)
    half = 0.5 * dt
    two_eps = 2.0 * eps
    sin = math.sin
    cos = math.cos
    try:
        f = [0.0] * d
        for key, vr, vi in pairs:
            theta = 0.0
            for k in ks:
                theta += key[k] * x_list[k]
            s = two_eps * (vr * sin(theta) + vi * cos(theta))
            for k in ks:
                f[k] += s * key[k]
        h0 = (0.5 * sum(v * v for v in p_list)
              + _pair_energy(pairs, v0, eps, x_list))
    except (ValueError, OverflowError):
        raise ValueError("initial state is not evaluable (phase overflow)")

    times = [0.0]
    xs = [tuple(x_list)]
    ps = [tuple(p_list)]
    hs = [h0]
    failed = False
    try:
        for step in range(1, n_steps + 1):
            for k in ks:
                p_list[k] += half * f[k]
                x_list[k] += dt * p_list[k]
            for k in ks:
                f[k] = 0.0
            for key, vr, vi in pairs:
                theta = 0.0
                for k in ks:
                    theta += key[k] * x_list[k]
                s = two_eps * (vr * sin(theta) + vi * cos(theta))
                for k in ks:
                    f[k] += s * key[k]
            for k in ks:
                p_list[k] += half * f[k]
            if step % sample_every == 0 or step == n_steps:
                if not all(map(math.isfinite, x_list + p_list)):
                    raise _NonFiniteState
                times.append(step * dt)
                xs.append(tuple(x_list))
                ps.append(tuple(p_list))
                hs.append(0.5 * sum(v * v for v in p_list)
                          + _pair_energy(pairs, v0, eps, x_list))
    except (_NonFiniteState, ValueError, OverflowError):
        failed = True
    return times, xs, ps, hs, failed


def _steps_2d_single_pair(pair, v0, eps, x_list, p_list, dt, n_steps,
                          sample_every):
    # unrolled hot path: one +-G pair in the plane covers the resonant
    # pendulum runs, which need millions of steps for the drift checks
    (g0, g1), vr, vi = pair
    half = 0.5 * dt
    two_eps = 2.0 * eps
    sin = math.sin
    cos = math.cos
    x0, x1 = x_list
    p0, p1 = p_list

    def energy(px, py, theta):
        return (0.5 * (px * px + py * py)
                + eps * (v0 + 2.0 * (vr * cos(theta) - vi * sin(theta))))

    try:
        theta = g0 * x0 + g1 * x1
        s = two_eps * (vr * sin(theta) + vi * cos(theta))
        f0 = s * g0
        f1 = s * g1
        h0 = energy(p0, p1, theta)
    except (ValueError, OverflowError):
        raise ValueError("initial state is not evaluable (phase overflow)")
    times = [0.0]
    xs = [(x0, x1)]
    ps = [(p0, p1)]
    hs = [h0]
    failed = False
    try:
        for step in range(1, n_steps + 1):
            p0 += half * f0
            p1 += half * f1
            x0 += dt * p0
            x1 += dt * p1
            theta = g0 * x0 + g1 * x1
            s = two_eps * (vr * sin(theta) + vi * cos(theta))
            f0 = s * g0
            f1 = s * g1
            p0 += half * f0
            p1 += half * f1
            if step % sample_every == 0 or step == n_steps:
                if not (math.isfinite(x0) and math.isfinite(x1)
                        and math.isfinite(p0) and math.isfinite(p1)):
                    raise _NonFiniteState
                times.append(step * dt)
                xs.append((x0, x1))
                ps.append((p0, p1))
                hs.append(energy(p0, p1, theta))
    except (_NonFiniteState, ValueError, OverflowError):
        failed = True
    return times, xs, ps, hs, failed


def integrate(pot: FourierPotential, x0: Sequence[float],
              p0: Sequence[float], T: float, dt: Optional[float] = None,
              sample_every: int = 1) -> CrystalTrajectory:
    """Velocity-Verlet run over [0, T], sampled every sample_every steps.

    dt defaults to 1/200 of the shortest potential period and is trimmed so
    an integer number of steps lands exactly on T; the final state is always
    sampled.  A non-finite state aborts the run and raises
    IntegrationFailureError carrying the sampled prefix.
    """
    x_arr = np.asarray(x0, dtype=float)
    p_arr = np.asarray(p0, dtype=float)
    d = pot.dimension
    if x_arr.shape != (d,) or p_arr.shape != (d,):
        raise ValueError("x0 and p0 must match the potential dimension")
    if not (np.all(np.isfinite(x_arr)) and np.all(np.isfinite(p_arr))):
        raise ValueError("x0 and p0 must be finite")
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError("T must be positive")
    if not isinstance(sample_every, (int, np.integer)) or sample_every < 1:
        raise ValueError("sample_every must be a positive integer")
    if dt is None:
        dt = _default_dt(pot, p_arr)
    dt = float(dt)
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError("dt must be positive")
    n_steps = max(1, math.ceil(T / dt - 1e-12))
    dt = T / n_steps

    pairs = pot.pairs()
    v0 = pot.constant_coefficient()
    x_list = [float(v) for v in x_arr]
    p_list = [float(v) for v in p_arr]
    if d == 2 and len(pairs) == 1:
        times, xs, ps, hs, failed = _steps_2d_single_pair(
            pairs[0], v0, pot.epsilon, x_list, p_list, dt, n_steps,
            int(sample_every))
    else:
        times, xs, ps, hs, failed = _steps_generic(
            pairs, v0, pot.epsilon, x_list, p_list, dt, n_steps,
            int(sample_every))

    traj = CrystalTrajectory(times=np.array(times), positions=np.array(xs),
                             momenta=np.array(ps), energies=np.array(hs),
                             dt=dt, pot=pot)
    if failed:
        raise IntegrationFailureError(
            f"state left the finite floats after t = {times[-1]:.6g}",
            last_good_time=times[-1], partial=traj)
    return traj


@dataclass(frozen=True, eq=False)
class KickReport:
    """Momentum change of a run, compared against the separatrix bound."""

    delta_p: np.ndarray
    magnitude: float
    alignment: float
    nearest_G: np.ndarray
    bound: float


def momentum_kick(traj: CrystalTrajectory,
                  pot: Optional[FourierPotential] = None) -> KickReport:
    """Endpoint momentum change p(T) - p(0) of a sampled run.

    Reports the cosine against the best-aligned reciprocal vector of the
    potential support and the separatrix bound sqrt(4 eps |V_G0|) built
    from the least-|G| pair.  A zero kick counts as aligned by convention.
    """
    pot = traj.pot if pot is None else pot
    dp = traj.momenta[-1] - traj.momenta[0]
    magnitude = float(np.linalg.norm(dp))
    g0, v0 = pot.dominant_pair()
    bound = math.sqrt(4.0 * pot.epsilon * abs(v0))
    if magnitude == 0.0:
        return KickReport(delta_p=dp, magnitude=magnitude, alignment=1.0,
                          nearest_G=g0, bound=bound)
    best_cos = -2.0
    best_g = g0
    for key, _, _ in pot.pairs():
        g = np.array(key)
        g_norm = float(np.linalg.norm(g))
        for signed in (g, -g):
            cosine = float(signed @ dp) / (g_norm * magnitude)
            if cosine > best_cos:
                best_cos = cosine
                best_g = signed
    return KickReport(delta_p=dp, magnitude=magnitude, alignment=best_cos,
                      nearest_G=best_g, bound=bound)


@dataclass(frozen=True, eq=False)
class KickRun:
    """One ensemble member: seeded launch phase and its kick report."""

    index: int
    theta0: float
    report: KickReport


def _pendulum_period(pot: FourierPotential) -> float:
    g0, v0 = pot.dominant_pair()
    w2 = 2.0 * pot.epsilon * abs(v0) * float(g0 @ g0)
    if w2 <= 0.0:
        raise ValueError("dominant pair has no restoring force")
    return TWO_PI / math.sqrt(w2)


def _kick_job(args) -> KickRun:
    pot, p_perp, seed, index, T, dt = args
    rng = np.random.default_rng([seed, index])
    theta0 = float(rng.uniform(0.5 * math.pi, 1.5 * math.pi))
    g0, _ = pot.dominant_pair()
    x0 = (theta0 / float(g0 @ g0)) * g0
    traj = integrate(pot, x0, np.asarray(p_perp, dtype=float), T, dt=dt,
                     sample_every=10 ** 9)
    return KickRun(index=index, theta0=theta0,
                   report=momentum_kick(traj, pot))


def kick_ensemble(pot: FourierPotential, p_perp: Sequence[float],
                  n_runs: int, seed: int, T: Optional[float] = None,
                  dt: Optional[float] = None,
                  workers: int = 1) -> List[KickRun]:
    """Sweep of resonant launches with random phase along the dominant G.

    Each run i draws its starting phase theta0 ~ U[pi/2, 3pi/2] from an
    independent generator keyed by (seed, i), starts from rest along the
    pendulum axis at x0 = theta0 G0 / |G0|^2 with the supplied transverse
    momentum, and reports the endpoint kick.  Results are merged in run
    order, so the output is identical for any worker count.
    """
    if not isinstance(n_runs, (int, np.integer)) or n_runs < 1:
        raise ValueError("n_runs must be a positive integer")
    if not isinstance(workers, (int, np.integer)) or workers < 1:
        raise ValueError("workers must be a positive integer")
    p_arr = np.asarray(p_perp, dtype=float)
    if p_arr.shape != (pot.dimension,):
        raise ValueError("p_perp must match the potential dimension")
    g0, _ = pot.dominant_pair()
    proj = abs(float(g0 @ p_arr))
    scale = float(np.linalg.norm(g0)) * float(np.linalg.norm(p_arr))
    if proj > 1e-9 * max(scale, 1e-300):
        raise ValueError("p_perp must be perpendicular to the dominant G")
    period = _pendulum_period(pot)
    if T is None:
        T = 4.0 * period
    if dt is None:
        # fine enough that the integrator's energy wobble cannot push the
        # measured kick past the separatrix bound
        dt = period / 2000.0
    jobs = [(pot, tuple(float(v) for v in p_arr), int(seed), i, float(T),
             float(dt)) for i in range(int(n_runs))]
    if workers == 1:
        return [_kick_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=int(workers)) as pool:
        return list(pool.map(_kick_job, jobs))


def vonlaue_shift(L: float, u: Sequence[float],
                  G: Sequence[float]) -> np.ndarray:
    """Direction change (L |u| / 2 pi) G of a unit beam, |u| normalized.

    Only the direction of u matters; after internal normalization the shift
    is (L / 2 pi) G, and G = 0 returns the unchanged forward beam.
    """
    if not (math.isfinite(L) and L > 0.0):
        raise ValueError("period L must be positive")
    u_arr = np.asarray(u, dtype=float)
    if float(np.linalg.norm(u_arr)) == 0.0:
        raise ValueError("beam direction must be nonzero")
    g_arr = np.asarray(G, dtype=float)
    if u_arr.shape != g_arr.shape:
        raise ValueError("u and G must have the same dimension")
    return (L / TWO_PI) * g_arr


def vonlaue_residual(lattice: Lattice, L: float, G: Sequence[float],
                     n_max: int = 3) -> float:
    """Worst distance of du . dr_j from the nearest multiple of L.

    du is the direction change of vonlaue_shift and dr_j runs over all
    lattice translations with |m_i| <= n_max.  The residual is at round-off
    exactly when G belongs to the reciprocal lattice.
    """
    g_arr = np.asarray(G, dtype=float)
    if g_arr.shape != (lattice.dimension,):
        raise ValueError("G must match the lattice dimension")
    if not (math.isfinite(L) and L > 0.0):
        raise ValueError("period L must be positive")
    du = (L / TWO_PI) * g_arr
    worst = 0.0
    for site in lattice.translations(n_max=n_max, include_zero=True):
        delay = float(du @ site)
        worst = max(worst, abs(delay - L * round(delay / L)))
    return worst
