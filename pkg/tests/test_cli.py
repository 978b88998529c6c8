"""CLI behavior: config resolution, output formats, determinism, exit codes."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from nddelec.cli import run

approx = pytest.approx


def _meta(path):
    first = Path(path).read_text().splitlines()[0]
    assert first.startswith("# meta = ")
    return json.loads(first[len("# meta = "):])


def _table(path):
    lines = Path(path).read_text().splitlines()
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


class TestConfigResolution:
    def test_defaults_recorded_in_meta(self, tmp_path):
        out = tmp_path / "n.csv"
        assert run(["ndde", "--out", str(out)]) == 0
        cfg = _meta(out)["config"]
        assert cfg["kind"] == "retarded"
        assert cfg["a"] == 0.5
        assert cfg["steps_per_delay"] == 200

    def test_flag_beats_config_file_beats_default(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text('{"a": 0.25, "horizon": 3}')
        out = tmp_path / "n.csv"
        assert run(["ndde", "--config", str(cfg_path), "--a", "0.5",
                    "--out", str(out)]) == 0
        cfg = _meta(out)["config"]
        assert cfg["a"] == 0.5       # flag wins
        assert cfg["horizon"] == 3   # file beats default 5
        assert cfg["delay"] == 1.0   # default survives

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text('{"nonsense_key": 1}')
        assert run(["ndde", "--config", str(cfg_path)]) == 2
        assert "nonsense_key" in capsys.readouterr().err

    def test_config_must_be_object(self, tmp_path):
        cfg_path = tmp_path / "c.json"
        cfg_path.write_text("[1, 2]")
        assert run(["ndde", "--config", str(cfg_path)]) == 2

    def test_missing_config_file_exits_2(self, tmp_path):
        assert run(["ndde", "--config", str(tmp_path / "absent.json")]) == 2

    def test_unknown_flag_exits_2(self, capsys):
        assert run(["ndde", "--bogus", "1"]) == 2
        capsys.readouterr()

    def test_missing_subcommand_exits_2(self, capsys):
        assert run([]) == 2
        capsys.readouterr()

    def test_help_exits_0(self, capsys):
        assert run(["--help"]) == 0
        assert "ndde" in capsys.readouterr().out


class TestNdde:
    def test_neutral_reference_jump_ladder(self, tmp_path):
        out = tmp_path / "n.csv"
        assert run(["ndde", "--kind", "neutral", "--a", "0.5",
                    "--horizon", "5", "--out", str(out)]) == 0
        points = _meta(out)["breaking_points"]
        assert [p["t"] for p in points] == [0.0, 1.0, 2.0, 3.0, 4.0]
        for n, point in enumerate(points):
            assert point["jumps"][0] == approx(-0.5 ** (n + 1), rel=1e-9)

    def test_csv_columns_and_roundtrip(self, tmp_path):
        out = tmp_path / "n.csv"
        assert run(["ndde", "--kind", "neutral", "--a", "0.5",
                    "--horizon", "2", "--out", str(out)]) == 0
        header, rows = _table(out)
        assert header == ["t", "y", "ydot_left", "ydot_right"]
        first = [float(v) for v in rows[0]]
        # history h(t) = t: left slope 1, right slope a * 1 = 0.5 exactly
        assert first == [0.0, 0.0, 1.0, 0.5]

    def test_blow_up_flushes_partial_and_exits_1(self, tmp_path, capsys):
        out = tmp_path / "n.csv"
        assert run(["ndde", "--kind", "neutral", "--a", "10",
                    "--horizon", "400", "--out", str(out)]) == 1
        assert "non-finite" in capsys.readouterr().err
        meta = _meta(out)
        assert meta["failure"]["last_good_time"] > 0
        _, rows = _table(out)
        assert len(rows) > 100
        assert float(rows[-1][0]) == meta["failure"]["last_good_time"]


class TestLightcone:
    def test_both_branches_of_kink_preset(self, tmp_path):
        out = tmp_path / "l.csv"
        assert run(["lightcone", "--out", str(out)]) == 0
        header, rows = _table(out)
        assert header[:3] == ["branch", "t", "t_dev"]
        assert [r[0] for r in rows] == ["retarded", "advanced"]
        # x = (4,0,0), t = 5, worldline x(t) = 0.05 t on the right of the
        # kink: t_dev = t -/+ (4 - 0.05 t_dev)
        ret, adv = rows
        assert float(ret[2]) == approx(1.0 / 0.95, rel=1e-12)
        assert float(adv[2]) == approx(9.0 / 1.05, rel=1e-12)
        assert float(ret[9]) == approx(1.0 / 0.95, rel=1e-12)   # 1/(1 - v)
        assert float(adv[9]) == approx(1.0 / 1.05, rel=1e-12)   # 1/(1 + v)

    def test_single_branch(self, tmp_path):
        out = tmp_path / "l.csv"
        assert run(["lightcone", "--branch", "retarded",
                    "--out", str(out)]) == 0
        _, rows = _table(out)
        assert len(rows) == 1

    def test_observation_outside_domain_exits_2(self, tmp_path, capsys):
        out = tmp_path / "l.csv"
        assert run(["lightcone", "--t", "1000", "--out", str(out)]) == 2
        assert "domain" in capsys.readouterr().err


class TestFieldProbe:
    def test_grid_rows_per_branch(self, tmp_path):
        out = tmp_path / "f.csv"
        assert run(["field-probe", "--preset", "wiggle", "--x", "8,0,0",
                    "--t-start", "0", "--t-stop", "10", "--t-num", "4",
                    "--out", str(out)]) == 0
        header, rows = _table(out)
        assert header == ["branch", "t", "x", "y", "z",
                          "Ex", "Ey", "Ez", "Bx", "By", "Bz"]
        assert len(rows) == 12
        assert [r[0] for r in rows[:3]] == ["retarded", "advanced", "semisum"]
        values = np.array([[float(v) for v in r[1:]] for r in rows])
        assert np.all(np.isfinite(values))
        assert np.max(np.abs(values[:, 4:7])) > 0  # radiating worldline

    def test_semisum_is_mean_of_branches(self, tmp_path):
        out = tmp_path / "f.csv"
        assert run(["field-probe", "--preset", "wiggle", "--x", "8,0,0",
                    "--t", "3", "--out", str(out)]) == 0
        _, rows = _table(out)
        ret, adv, semi = (np.array([float(v) for v in r[4:7]]) for r in rows)
        assert semi == approx(0.5 * (ret + adv), rel=1e-15, abs=1e-300)

    def test_incomplete_grid_flags_exit_2(self, tmp_path):
        assert run(["field-probe", "--t-start", "0",
                    "--out", str(tmp_path / "f.csv")]) == 2


class TestSewing:
    def test_static_pair_ladder(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run(["sewing", "--preset", "static-pair", "--n-steps", "6",
                    "--out", str(out)]) == 0
        header, rows = _table(out)
        assert header == ["generation", "trajectory_id", "t"]
        gens = [int(r[0]) for r in rows]
        ids = [int(r[1]) for r in rows]
        times = [float(r[2]) for r in rows]
        assert gens == list(range(7))
        assert ids == [0, 1, 0, 1, 0, 1, 0]  # alternating pair
        assert times == approx([3.0 * k for k in range(7)], abs=1e-9)
        meta = _meta(out)
        assert meta["truncated"] is False
        assert meta["spacings"] == approx([6.0] * 5, abs=1e-9)


class TestDoubleslit:
    def test_report_values(self, tmp_path):
        out = tmp_path / "d.json"
        bragg_out = tmp_path / "b.csv"
        assert run(["doubleslit", "--v3", "0.01", "--out", str(out),
                    "--bragg-out", str(bragg_out)]) == 0
        report = json.loads(out.read_text())
        assert report["lambda_db"] == approx(18892.199551660844, rel=1e-12)
        assert report["L"] == approx(90.0, rel=1e-12)
        assert report["ratio_to_h_over_mv"] == approx(4.55755600673709,
                                                      rel=1e-12)
        by_n = {entry["n"]: entry["theta_deg"] for entry in report["bragg"]}
        assert by_n[0] == 0.0
        assert by_n[1] == approx(30.0, rel=1e-12)  # default a = 2 lambda
        assert by_n[-1] == approx(-30.0, rel=1e-12)
        assert report["meta"]["config"]["a"] == approx(
            2 * report["lambda_db"], rel=1e-15)

    def test_bragg_csv_matches_json(self, tmp_path):
        out = tmp_path / "d.json"
        bragg_out = tmp_path / "b.csv"
        assert run(["doubleslit", "--out", str(out),
                    "--bragg-out", str(bragg_out)]) == 0
        report = json.loads(out.read_text())
        header, rows = _table(bragg_out)
        assert header == ["n", "theta_rad", "theta_deg"]
        assert len(rows) == len(report["bragg"])
        for row, entry in zip(rows, report["bragg"]):
            assert int(row[0]) == entry["n"]
            assert float(row[2]) == approx(entry["theta_deg"], rel=1e-15)
            assert math.degrees(float(row[1])) == approx(float(row[2]),
                                                         rel=1e-15)

    def test_separation_below_wavelength_exits_2(self, tmp_path, capsys):
        assert run(["doubleslit", "--a", "10",
                    "--out", str(tmp_path / "d.json")]) == 2
        assert "exceeds" in capsys.readouterr().err


class TestCrystal:
    def test_hamiltonian_run_conserves_energy(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run(["crystal", "hamiltonian", "--T", "8",
                    "--out", str(out)]) == 0
        header, rows = _table(out)
        assert header == ["t", "x", "y", "px", "py", "H"]
        energies = np.array([float(r[5]) for r in rows])
        assert np.max(np.abs(energies - energies[0])) <= 1e-6
        # G along x: transverse momentum is untouched, bit for bit
        assert {r[4] for r in rows} == {"1"}

    def test_hamiltonian_blow_up_flushes_partial(self, tmp_path, capsys):
        out = tmp_path / "c.csv"
        assert run(["crystal", "hamiltonian", "--x0", "1e306,0",
                    "--p0", "1e307,0", "--dt", "0.5", "--T", "50",
                    "--out", str(out)]) == 1
        capsys.readouterr()
        meta = _meta(out)
        assert meta["failure"]["last_good_time"] > 0
        _, rows = _table(out)
        # the propagated state stays finite in the flushed prefix; the
        # derived energy may overflow before the state does
        state = np.array([[float(v) for v in r[:5]] for r in rows])
        assert np.all(np.isfinite(state))
        assert float(rows[-1][0]) == meta["failure"]["last_good_time"]

    def test_kick_sweep_rows(self, tmp_path):
        out = tmp_path / "k.csv"
        assert run(["crystal", "kick-sweep", "--n-runs", "8", "--seed", "5",
                    "--workers", "1", "--out", str(out)]) == 0
        header, rows = _table(out)
        assert header == ["run", "theta0", "dpx", "dpy", "magnitude",
                          "alignment", "bound"]
        assert [int(r[0]) for r in rows] == list(range(8))
        for row in rows:
            theta0 = float(row[1])
            assert math.pi / 2 <= theta0 <= 3 * math.pi / 2
            assert float(row[4]) <= float(row[6]) * (1 + 1e-6)
            assert float(row[5]) == 1.0

    def test_kick_sweep_workers_share_results(self, tmp_path):
        one = tmp_path / "k1.csv"
        two = tmp_path / "k2.csv"
        assert run(["crystal", "kick-sweep", "--n-runs", "6", "--seed", "9",
                    "--workers", "1", "--out", str(one)]) == 0
        assert run(["crystal", "kick-sweep", "--n-runs", "6", "--seed", "9",
                    "--workers", "2", "--out", str(two)]) == 0
        # identical data rows; only the recorded worker count may differ
        assert one.read_text().splitlines()[1:] == \
            two.read_text().splitlines()[1:]

    def test_kick_sweep_byte_identical_reruns(self, tmp_path):
        out = tmp_path / "k.csv"
        args = ["crystal", "kick-sweep", "--n-runs", "5", "--seed", "3",
                "--workers", "2", "--out", str(out)]
        assert run(args) == 0
        first = out.read_bytes()
        assert run(args) == 0
        assert out.read_bytes() == first

    def test_env_overrides_workers_flag(self, tmp_path, monkeypatch):
        out = tmp_path / "k.csv"
        monkeypatch.setenv("NDDE_NUM_WORKERS", "2")
        assert run(["crystal", "kick-sweep", "--n-runs", "3", "--seed", "1",
                    "--workers", "1", "--out", str(out)]) == 0
        assert _meta(out)["config"]["workers"] == 2

    def test_bad_env_worker_count_exits_2(self, tmp_path, monkeypatch,
                                          capsys):
        monkeypatch.setenv("NDDE_NUM_WORKERS", "abc")
        assert run(["crystal", "kick-sweep", "--n-runs", "2",
                    "--out", str(tmp_path / "k.csv")]) == 2
        assert "NDDE_NUM_WORKERS" in capsys.readouterr().err

    def test_vonlaue_single_vector(self, tmp_path):
        out = tmp_path / "v.json"
        assert run(["crystal", "vonlaue", "--L", "1", "--G", "2pi,0",
                    "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        (row,) = report["rows"]
        assert row["G"] == approx([2 * math.pi, 0.0], rel=1e-15)
        assert row["du"] == approx([1.0, 0.0], rel=1e-15)
        assert row["residual"] <= 1e-10

    def test_vonlaue_patch_covers_square_lattice(self, tmp_path):
        out = tmp_path / "v.json"
        assert run(["crystal", "vonlaue", "--n-max", "1",
                    "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert len(report["rows"]) == 9
        assert all(row["residual"] <= 1e-10 for row in report["rows"])
