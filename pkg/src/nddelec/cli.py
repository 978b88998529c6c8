"""Command-line front end: config ingestion and CSV/JSON emission.

Subcommands
    ndde         linear constant-delay reference problem -> CSV of nodes
    lightcone    deviating-time solve on a worldline -> CSV rows per branch
    field-probe  far fields at observation events -> CSV rows per branch
    sewing       discontinuity-chain hops -> CSV generation/id/time rows
    doubleslit   interference-length pipeline -> JSON report + Bragg CSV
    crystal      hamiltonian | kick-sweep | vonlaue

Conventions
    - A JSON config file (--config) seeds each command's parameters;
      explicit flags override file values, file values override defaults.
    - Numbers are written with 17 significant digits and '.' decimals so
      outputs round-trip exactly and identical runs are byte-identical.
    - Every output embeds the tool version and the fully resolved config:
      CSV files start with one '# meta = {...}' line, JSON files carry a
      "meta" key.  NaN becomes null.  No timestamps.
    - Exit codes: 0 success; 1 numerical failure, with whatever rows were
      already computed flushed next to a failure record; 2 configuration
      errors (bad flags, bad config keys, violated preconditions).
    - Vector flags take comma-separated components; a component may use a
      'pi' suffix, e.g. --G 2pi,0 or --G -0.5pi,0,0.
    - NDDE_NUM_WORKERS overrides the worker count of sweep commands.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .crystal import (FourierPotential, integrate, kick_ensemble,
                      Lattice, momentum_kick, vonlaue_shift, vonlaue_residual)
from .delay_core import (IntegrationFailureError, NEUTRAL, RETARDED,
                         ScalarDelayProblem, solve)
from .farfield import SimulationHorizonError, sample_fields
from .lightcone import (ADVANCED, ConvergenceError, SingularityError,
                        causal_side, solve_lightcone)
from .sewing import DiscontinuityEvent, chain_spacings, propagate_chain
from .slit_model import (SlitConfig, bragg_directions, closest_approach_L,
                         de_broglie_length, de_broglie_ratio, recoil_factor)
from .trajectory import (DomainError, from_hermite_samples, HistoryFunction,
                         PiecewiseTrajectory, piecewise_linear, static_point,
                         straight_line)

TWO_PI = 2.0 * math.pi

_NUMERICAL_ERRORS = (ConvergenceError, SingularityError)
_PRECONDITION_ERRORS = (DomainError, SimulationHorizonError, ValueError)


class ConfigError(Exception):
    """Invalid flag/config combination; maps to exit code 2."""


# --------------------------------------------------------------------------
# parsing and serialization helpers

_PI_TOKEN = re.compile(r"^([+-]?\d*\.?\d*)pi$")


def _parse_component(token: str) -> float:
    token = token.strip()
    match = _PI_TOKEN.match(token)
    if match:
        prefix = match.group(1)
        if prefix in ("", "+"):
            factor = 1.0
        elif prefix == "-":
            factor = -1.0
        else:
            factor = float(prefix)
        return factor * math.pi
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"cannot parse numeric component {token!r}")


def _vec(value) -> tuple:
    """Coerce a flag string or config list into a tuple of floats."""
    if isinstance(value, str):
        parts = value.split(",")
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ConfigError(f"expected a vector, got {value!r}")
    out = []
    for part in parts:
        if isinstance(part, str):
            out.append(_parse_component(part))
        else:
            out.append(float(part))
    return tuple(out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def _meta(command: str, resolved: dict, extras: Optional[dict] = None) -> dict:
    meta = {"tool": "nddelec", "version": __version__, "command": command,
            "config": _jsonable(resolved)}
    if extras:
        meta.update(_jsonable(extras))
    return meta


def _write_csv(path: str, command: str, resolved: dict,
               columns: Sequence[str], rows: Sequence[Sequence],
               extras: Optional[dict] = None) -> None:
    meta = _meta(command, resolved, extras)
    lines = ["# meta = " + json.dumps(meta, sort_keys=True),
             ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path: str, command: str, resolved: dict, payload: dict,
                extras: Optional[dict] = None) -> None:
    body = {"meta": _meta(command, resolved, extras)}
    body.update(_jsonable(payload))
    Path(path).write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")


def _load_config(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _resolve(defaults: dict, args: argparse.Namespace) -> dict:
    resolved = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        file_cfg = _load_config(config_path)
        unknown = sorted(set(file_cfg) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        resolved.update(file_cfg)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _worker_count(resolved_value) -> int:
    env = os.environ.get("NDDE_NUM_WORKERS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"NDDE_NUM_WORKERS must be an integer, "
                              f"got {env!r}")
        if n < 1:
            raise ConfigError("NDDE_NUM_WORKERS must be >= 1")
        return n
    if resolved_value is not None:
        n = int(resolved_value)
        if n < 1:
            raise ConfigError("workers must be >= 1")
        return n
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# worldline sources shared by lightcone / field-probe / sewing

def _wiggle_worldline() -> PiecewiseTrajectory:
    """Transverse oscillation; the only preset with nonzero acceleration."""
    times = np.linspace(-50.0, 50.0, 401)
    omega, amp = 0.2, 1.0
    positions = [(0.0, amp * math.sin(omega * t), 0.0) for t in times]
    velocities = [(0.0, amp * omega * math.cos(omega * t), 0.0)
                  for t in times]
    return from_hermite_samples(times, positions, velocities)


_WORLDLINE_PRESETS = {
    "static": lambda: static_point((0.0, 0.0, 0.0), -1e4, 1e4),
    "drift": lambda: straight_line((-5.0, 0.0, 0.0), (0.5, 0.0, 0.0),
                                   -50.0, 50.0),
    "kink": lambda: piecewise_linear([-50.0, 0.0, 50.0],
                                     [(-5.0, 0.0, 0.0), (0.0, 0.0, 0.0),
                                      (2.5, 0.0, 0.0)]),
    "wiggle": _wiggle_worldline,
}


def _load_worldline(resolved: dict) -> PiecewiseTrajectory:
    path = resolved.get("worldline")
    if path:
        try:
            return PiecewiseTrajectory.from_json(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read worldline file: {exc}")
    preset = resolved.get("preset")
    if preset not in _WORLDLINE_PRESETS:
        raise ConfigError(f"unknown worldline preset {preset!r}")
    return _WORLDLINE_PRESETS[preset]()


def _sewing_preset(name: str) -> List[PiecewiseTrajectory]:
    if name == "static-pair":
        return [static_point((0.0, 0.0, 0.0), -1e5, 1e5),
                static_point((3.0, 0.0, 0.0), -1e5, 1e5)]
    if name == "approach":
        return [straight_line((-5.0, 0.0, 0.0), (0.03, 0.0, 0.0),
                              -10.0, 160.0),
                straight_line((5.0, 0.0, 0.0), (-0.03, 0.0, 0.0),
                              -10.0, 160.0)]
    if name == "central":
        return [piecewise_linear([0.0, 20.0, 200.0],
                                 [(0.0, -5.0, 0.0), (0.0, 0.0, 0.0),
                                  (0.0, 0.0, 0.0)]),
                static_point((1.0, 0.0, 0.0), -10.0, 400.0)]
    raise ConfigError(f"unknown sewing preset {name!r}")


# --------------------------------------------------------------------------
# subcommands

_NDDE_DEFAULTS = {
    "kind": "retarded", "a": 0.5, "delay": 1.0, "horizon": 5.0,
    "steps_per_delay": 200, "history_poly": (0.0, 1.0), "out": "ndde.csv",
}


def _cmd_ndde(args) -> int:
    resolved = _resolve(_NDDE_DEFAULTS, args)
    kind = resolved["kind"]
    if kind not in (RETARDED, NEUTRAL):
        raise ConfigError(f"kind must be retarded or neutral, got {kind!r}")
    coeff = float(resolved["a"])
    coeffs = _vec(resolved["history_poly"])
    resolved["history_poly"] = coeffs
    history = HistoryFunction.from_polynomial(
        coeffs, t_min=-float(resolved["delay"]))
    if kind == RETARDED:
        rhs = lambda y, yd: coeff * yd            # ydot(t) = a y(t - tau)
    else:
        rhs = lambda y, yd, ydotd: coeff * ydotd  # ydot(t) = a ydot(t - tau)
    problem = ScalarDelayProblem(kind=kind, rhs=rhs, history=history,
                                 delay=float(resolved["delay"]),
                                 horizon=float(resolved["horizon"]))
    columns = ("t", "y", "ydot_left", "ydot_right")
    try:
        sol = solve(problem, steps_per_delay=int(resolved["steps_per_delay"]))
    except IntegrationFailureError as exc:
        rows = list(exc.partial.rows()) if exc.partial is not None else []
        _write_csv(resolved["out"], "ndde", resolved, columns, rows,
                   extras={"failure": {"message": str(exc),
                                       "last_good_time": exc.last_good_time}})
        print(f"ndde: {exc}", file=sys.stderr)
        return 1
    points = [{"t": bp.t, "jumps": list(bp.jumps)}
              for bp in sol.breaking_points]
    _write_csv(resolved["out"], "ndde", resolved, columns, sol.rows(),
               extras={"breaking_points": points})
    return 0


_LIGHTCONE_DEFAULTS = {
    "preset": "kink", "worldline": None, "x": (4.0, 0.0, 0.0), "t": 5.0,
    "branch": "both", "out": "lightcone.csv",
}


def _cmd_lightcone(args) -> int:
    resolved = _resolve(_LIGHTCONE_DEFAULTS, args)
    resolved["x"] = _vec(resolved["x"])
    traj = _load_worldline(resolved)
    branch_opt = resolved["branch"]
    if branch_opt == "both":
        branches = ("retarded", "advanced")
    elif branch_opt in ("retarded", "advanced"):
        branches = (branch_opt,)
    else:
        raise ConfigError(f"branch must be retarded, advanced or both, "
                          f"got {branch_opt!r}")
    t = float(resolved["t"])
    columns = ("branch", "t", "t_dev", "x_dev", "y_dev", "z_dev",
               "vx_dev", "vy_dev", "vz_dev", "dtdev_dt", "on_breakpoint")
    rows: list = []
    try:
        for branch in branches:
            hit = solve_lightcone(traj, resolved["x"], t, branch)
            pos = traj.position(hit.t_dev, side=causal_side(branch))
            rows.append([branch, t, hit.t_dev, *pos, *hit.v_dev,
                         hit.dtdev_dt, int(hit.on_breakpoint)])
    except _NUMERICAL_ERRORS as exc:
        _write_csv(resolved["out"], "lightcone", resolved, columns, rows,
                   extras={"failure": {"message": str(exc)}})
        print(f"lightcone: {exc}", file=sys.stderr)
        return 1
    _write_csv(resolved["out"], "lightcone", resolved, columns, rows)
    return 0


_FIELD_PROBE_DEFAULTS = {
    "preset": "drift", "worldline": None, "x": (0.0, 3.0, 0.0), "t": 1.0,
    "t_start": None, "t_stop": None, "t_num": None, "out": "fields.csv",
}


def _cmd_field_probe(args) -> int:
    resolved = _resolve(_FIELD_PROBE_DEFAULTS, args)
    resolved["x"] = _vec(resolved["x"])
    traj = _load_worldline(resolved)
    grid_flags = [resolved["t_start"], resolved["t_stop"], resolved["t_num"]]
    if any(v is not None for v in grid_flags):
        if any(v is None for v in grid_flags):
            raise ConfigError("t_start, t_stop and t_num must be given "
                              "together")
        n = int(resolved["t_num"])
        if n < 1:
            raise ConfigError("t_num must be >= 1")
        times = np.linspace(float(resolved["t_start"]),
                            float(resolved["t_stop"]), n)
    else:
        times = np.array([float(resolved["t"])])
    columns = ("branch", "t", "x", "y", "z",
               "Ex", "Ey", "Ez", "Bx", "By", "Bz")
    point = resolved["x"]
    rows: list = []
    try:
        for t in times:
            fs = sample_fields(traj, point, float(t))
            rows.append(["retarded", t, *point, *fs.E_minus, *fs.B_minus])
            rows.append(["advanced", t, *point, *fs.E_plus, *fs.B_plus])
            rows.append(["semisum", t, *point, *fs.E, *fs.B])
    except _NUMERICAL_ERRORS as exc:
        _write_csv(resolved["out"], "field-probe", resolved, columns, rows,
                   extras={"failure": {"message": str(exc)}})
        print(f"field-probe: {exc}", file=sys.stderr)
        return 1
    _write_csv(resolved["out"], "field-probe", resolved, columns, rows)
    return 0


_SEWING_DEFAULTS = {
    "preset": "static-pair", "worldlines": None, "source_id": 0,
    "partner_id": 1, "t0": 0.0, "n_steps": 12, "out": "sewing.csv",
}


def _cmd_sewing(args) -> int:
    resolved = _resolve(_SEWING_DEFAULTS, args)
    path = resolved.get("worldlines")
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read worldlines file: {exc}")
        if not isinstance(data, list) or len(data) < 2:
            raise ConfigError("worldlines file must hold a JSON list of at "
                              "least two trajectories")
        trajectories = [PiecewiseTrajectory.from_dict(item) for item in data]
    else:
        trajectories = _sewing_preset(resolved["preset"])
    source = DiscontinuityEvent(trajectory_id=int(resolved["source_id"]),
                                t=float(resolved["t0"]), generation=0)
    chain = propagate_chain(trajectories, source,
                            partner_id=int(resolved["partner_id"]),
                            n_steps=int(resolved["n_steps"]))
    extras = {"truncated": chain.truncated}
    if len(chain.events) >= 3:
        extras["spacings"] = list(chain_spacings(chain))
    rows = [[ev.generation, ev.trajectory_id, ev.t] for ev in chain.events]
    _write_csv(resolved["out"], "sewing", resolved,
               ("generation", "trajectory_id", "t"), rows, extras=extras)
    return 0


_DOUBLESLIT_DEFAULTS = {
    "a": None, "v3": 0.01, "mass_ratio": 1836.15267, "m_scattered": 1.0,
    "n_electrons_per_site": 1, "n_max": 3, "v1": 0.9, "n31_dot_v1": 0.0,
    "out": "doubleslit.json", "bragg_out": "doubleslit_bragg.csv",
}


def _cmd_doubleslit(args) -> int:
    resolved = _resolve(_DOUBLESLIT_DEFAULTS, args)
    probe = SlitConfig(a=1.0, v3=float(resolved["v3"]),
                       mass_ratio=float(resolved["mass_ratio"]),
                       m_scattered=float(resolved["m_scattered"]),
                       n_electrons_per_site=int(
                           resolved["n_electrons_per_site"]))
    lambda_db = de_broglie_length(probe)
    if resolved["a"] is None:
        resolved["a"] = 2.0 * lambda_db  # first side peak at 30 degrees
    config = SlitConfig(a=float(resolved["a"]), v3=probe.v3,
                        mass_ratio=probe.mass_ratio,
                        m_scattered=probe.m_scattered,
                        n_electrons_per_site=probe.n_electrons_per_site)
    speed = float(resolved["v1"])
    if speed < 0.0 or speed >= 1.0:
        raise ConfigError("v1 must lie in [0, 1)")
    if speed == 0.0:
        v1_vec = (0.0, 0.0, 0.0)
        n31 = (1.0, 0.0, 0.0)
    else:
        cos_part = float(resolved["n31_dot_v1"]) / speed
        if abs(cos_part) > 1.0:
            raise ConfigError("n31_dot_v1 exceeds |v1|")
        v1_vec = (speed, 0.0, 0.0)
        n31 = (cos_part, math.sqrt(1.0 - cos_part * cos_part), 0.0)
    length = closest_approach_L(config, v1_vec, n31)
    bragg = bragg_directions(config.a, lambda_db, int(resolved["n_max"]))
    report = {
        "L": length,
        "recoil_factor": recoil_factor(config.mass_ratio),
        "lambda_db": lambda_db,
        "ratio_to_h_over_mv": de_broglie_ratio(config),
        "bragg": [{"n": n, "theta_deg": math.degrees(theta)}
                  for n, theta in bragg],
    }
    _write_json(resolved["out"], "doubleslit", resolved, report)
    _write_csv(resolved["bragg_out"], "doubleslit", resolved,
               ("n", "theta_rad", "theta_deg"),
               [[n, theta, math.degrees(theta)] for n, theta in bragg])
    return 0


_CRYSTAL_COMMON = {
    "G": (TWO_PI, 0.0), "V_re": 1.0, "V_im": 0.0, "epsilon": 0.01,
}

_CRYSTAL_HAMILTONIAN_DEFAULTS = {
    **_CRYSTAL_COMMON,
    "x0": (0.55, 0.0), "p0": (0.0, 1.0), "T": 30.0, "dt": None,
    "sample_every": 1, "out": "crystal_run.csv",
}


def _crystal_potential(resolved: dict) -> FourierPotential:
    g = _vec(resolved["G"])
    resolved["G"] = g
    coeff = complex(float(resolved["V_re"]), float(resolved["V_im"]))
    return FourierPotential.single_pair(g, coeff, float(resolved["epsilon"]))


def _cmd_crystal_hamiltonian(args) -> int:
    resolved = _resolve(_CRYSTAL_HAMILTONIAN_DEFAULTS, args)
    pot = _crystal_potential(resolved)
    if pot.dimension != 2:
        raise ConfigError("crystal hamiltonian runs in the plane; "
                          "give a 2-component G")
    resolved["x0"] = _vec(resolved["x0"])
    resolved["p0"] = _vec(resolved["p0"])
    dt = resolved["dt"]
    columns = ("t", "x", "y", "px", "py", "H")

    def table(traj) -> list:
        return [[traj.times[i], traj.positions[i, 0], traj.positions[i, 1],
                 traj.momenta[i, 0], traj.momenta[i, 1], traj.energies[i]]
                for i in range(len(traj))]

    try:
        traj = integrate(pot, resolved["x0"], resolved["p0"],
                         T=float(resolved["T"]),
                         dt=None if dt is None else float(dt),
                         sample_every=int(resolved["sample_every"]))
    except IntegrationFailureError as exc:
        rows = table(exc.partial) if exc.partial is not None else []
        _write_csv(resolved["out"], "crystal hamiltonian", resolved, columns,
                   rows,
                   extras={"failure": {"message": str(exc),
                                       "last_good_time": exc.last_good_time}})
        print(f"crystal hamiltonian: {exc}", file=sys.stderr)
        return 1
    _write_csv(resolved["out"], "crystal hamiltonian", resolved, columns,
               table(traj))
    return 0


_CRYSTAL_KICK_DEFAULTS = {
    **_CRYSTAL_COMMON,
    "p_perp": (0.0, 1.0), "n_runs": 32, "seed": 1234, "T": None, "dt": None,
    "workers": None, "out": "kicks.csv",
}


def _cmd_crystal_kick_sweep(args) -> int:
    resolved = _resolve(_CRYSTAL_KICK_DEFAULTS, args)
    pot = _crystal_potential(resolved)
    resolved["p_perp"] = _vec(resolved["p_perp"])
    resolved["workers"] = _worker_count(resolved["workers"])
    t_total = resolved["T"]
    dt = resolved["dt"]
    runs = kick_ensemble(pot, resolved["p_perp"],
                         n_runs=int(resolved["n_runs"]),
                         seed=int(resolved["seed"]),
                         T=None if t_total is None else float(t_total),
                         dt=None if dt is None else float(dt),
                         workers=resolved["workers"])
    rows = [[run.index, run.theta0, *run.report.delta_p,
             run.report.magnitude, run.report.alignment, run.report.bound]
            for run in runs]
    _write_csv(resolved["out"], "crystal kick-sweep", resolved,
               ("run", "theta0", "dpx", "dpy", "magnitude", "alignment",
                "bound"), rows)
    return 0


_CRYSTAL_VONLAUE_DEFAULTS = {
    "L": 1.0, "u": None, "G": None, "lattice_a": 1.0, "n_max": 1,
    "out": "vonlaue.json",
}


def _cmd_crystal_vonlaue(args) -> int:
    resolved = _resolve(_CRYSTAL_VONLAUE_DEFAULTS, args)
    period = float(resolved["L"])
    if resolved["G"] is not None:
        resolved["G"] = _vec(resolved["G"])
        dimension = len(resolved["G"])
        if dimension not in (2, 3):
            raise ConfigError("G must have 2 or 3 components")
        vectors = [np.asarray(resolved["G"], dtype=float)]
    else:
        dimension = 2
        vectors = None
    lattice = (Lattice.square(float(resolved["lattice_a"])) if dimension == 2
               else Lattice.cubic(float(resolved["lattice_a"])))
    if vectors is None:
        vectors = list(lattice.reciprocal_vectors(
            n_max=int(resolved["n_max"]), include_zero=True))
    if resolved["u"] is None:
        resolved["u"] = tuple(1.0 if k == 0 else 0.0
                              for k in range(dimension))
    else:
        resolved["u"] = _vec(resolved["u"])
    beam = resolved["u"]
    if len(beam) != dimension:
        raise ConfigError("u and G must have the same dimension")
    table = []
    for g in vectors:
        du = vonlaue_shift(period, beam, g)
        table.append({"G": list(g), "du": list(du),
                      "residual": vonlaue_residual(lattice, period, g)})
    _write_json(resolved["out"], "crystal vonlaue", resolved, {"rows": table})
    return 0


# --------------------------------------------------------------------------
# parser assembly

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file seeding the parameters")
    parser.add_argument("--out", help="output file path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nddelec",
        description="delayed-electrodynamics toolkit: delay integration, "
                    "lightcone roots, far fields, discontinuity chains, "
                    "interference estimates, crystal scattering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ndde", help="linear constant-delay reference run")
    _add_common(p)
    p.add_argument("--kind", choices=("retarded", "neutral"))
    p.add_argument("--a", type=float, help="coefficient of the delayed term")
    p.add_argument("--delay", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--steps-per-delay", dest="steps_per_delay", type=int)
    p.add_argument("--history-poly", dest="history_poly",
                   help="comma-separated polynomial coefficients, low first")
    p.set_defaults(func=_cmd_ndde)

    p = sub.add_parser("lightcone", help="deviating-time demo solve")
    _add_common(p)
    p.add_argument("--preset", choices=sorted(_WORLDLINE_PRESETS))
    p.add_argument("--worldline", help="trajectory JSON file")
    p.add_argument("--x", help="observation point, e.g. 4,0,0")
    p.add_argument("--t", type=float, help="observation time")
    p.add_argument("--branch", choices=("retarded", "advanced", "both"))
    p.set_defaults(func=_cmd_lightcone)

    p = sub.add_parser("field-probe", help="far fields at observation events")
    _add_common(p)
    p.add_argument("--preset", choices=sorted(_WORLDLINE_PRESETS))
    p.add_argument("--worldline", help="trajectory JSON file")
    p.add_argument("--x", help="probe point, e.g. 0,3,0")
    p.add_argument("--t", type=float, help="single probe time")
    p.add_argument("--t-start", dest="t_start", type=float)
    p.add_argument("--t-stop", dest="t_stop", type=float)
    p.add_argument("--t-num", dest="t_num", type=int)
    p.set_defaults(func=_cmd_field_probe)

    p = sub.add_parser("sewing", help="discontinuity chain between worldlines")
    _add_common(p)
    p.add_argument("--preset",
                   choices=("static-pair", "approach", "central"))
    p.add_argument("--worldlines", help="JSON list of trajectories")
    p.add_argument("--source-id", dest="source_id", type=int)
    p.add_argument("--partner-id", dest="partner_id", type=int)
    p.add_argument("--t0", type=float, help="seed event time")
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.set_defaults(func=_cmd_sewing)

    p = sub.add_parser("doubleslit", help="interference-length pipeline")
    _add_common(p)
    p.add_argument("--a", type=float, help="slit separation")
    p.add_argument("--v3", type=float, help="scattered-particle speed")
    p.add_argument("--mass-ratio", dest="mass_ratio", type=float)
    p.add_argument("--m-scattered", dest="m_scattered", type=float)
    p.add_argument("--n-electrons-per-site", dest="n_electrons_per_site",
                   type=int)
    p.add_argument("--n-max", dest="n_max", type=int,
                   help="highest side-peak order")
    p.add_argument("--v1", type=float, help="bound-partner speed")
    p.add_argument("--n31-dot-v1", dest="n31_dot_v1", type=float)
    p.add_argument("--bragg-out", dest="bragg_out",
                   help="CSV path for the direction table")
    p.set_defaults(func=_cmd_doubleslit)

    crystal = sub.add_parser("crystal", help="periodic-potential scattering")
    csub = crystal.add_subparsers(dest="crystal_command", required=True)

    p = csub.add_parser("hamiltonian", help="single velocity-Verlet run")
    _add_common(p)
    p.add_argument("--G", help="reciprocal vector, e.g. 2pi,0")
    p.add_argument("--V-re", dest="V_re", type=float)
    p.add_argument("--V-im", dest="V_im", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--x0", help="launch position")
    p.add_argument("--p0", help="launch momentum")
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--sample-every", dest="sample_every", type=int)
    p.set_defaults(func=_cmd_crystal_hamiltonian)

    p = csub.add_parser("kick-sweep", help="resonant kick ensemble")
    _add_common(p)
    p.add_argument("--G", help="reciprocal vector, e.g. 2pi,0")
    p.add_argument("--V-re", dest="V_re", type=float)
    p.add_argument("--V-im", dest="V_im", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--p-perp", dest="p_perp", help="transverse momentum")
    p.add_argument("--n-runs", dest="n_runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--workers", type=int,
                   help="worker processes (default: CPU count; "
                        "NDDE_NUM_WORKERS overrides)")
    p.set_defaults(func=_cmd_crystal_kick_sweep)

    p = csub.add_parser("vonlaue", help="direction-change table per G")
    _add_common(p)
    p.add_argument("--L", type=float, help="perturbation period")
    p.add_argument("--u", help="beam direction")
    p.add_argument("--G", help="single reciprocal vector; omit for a patch")
    p.add_argument("--lattice-a", dest="lattice_a", type=float,
                   help="square/cubic lattice spacing")
    p.add_argument("--n-max", dest="n_max", type=int,
                   help="patch half-width when --G is omitted")
    p.set_defaults(func=_cmd_crystal_vonlaue)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and map errors to exit codes 0/1/2."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _PRECONDITION_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except IntegrationFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
