import csv
import json
import math

import numpy as np
import pytest

from dce_sphere import cli
from dce_sphere.spectrum import RootSearchError


def run(argv, capsys=None):
    code = cli.main(argv)
    return code


class TestConfigBuilding:
    def test_defaults_infer_moving_shell(self):
        assert cli.make_config("dd", None).label == "DD̃"
        assert cli.make_config("nd", None).label == "ND̃"
        assert cli.make_config("dn", None).label == "D̃N"

    def test_neumann_moving_rejected(self):
        with pytest.raises(cli.ValidationError):
            cli.make_config("nd", "inner")
        with pytest.raises(cli.ValidationError):
            cli.make_config("dn", "outer")

    def test_unknown_bc(self):
        with pytest.raises(cli.ValidationError):
            cli.make_config("nn", None)

    def test_grid_parsing(self):
        assert cli._parse_grid("0:1:0.5") == [0.0, 0.5, 1.0]
        with pytest.raises(cli.ValidationError):
            cli._parse_grid("1:0:0.5")
        with pytest.raises(cli.ValidationError):
            cli._parse_grid("nonsense")


class TestMapCommand:
    def test_dd_map_point(self, tmp_path):
        out = tmp_path / "map.csv"
        code = run(
            ["map", "--bc", "dd", "--lmax", "1", "--smax", "1", "--grid", "1:1:1",
             "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        by_l = {int(r["l"]): float(r["y"]) for r in rows}
        assert by_l[0] == pytest.approx(2.0, abs=1e-9)  # l=0: y = x + s
        assert by_l[1] == pytest.approx(2.04904, abs=2e-3)
        assert rows[0]["s_prime"] == ""

    def test_determinism_and_worker_independence(self, tmp_path):
        args = ["map", "--bc", "nd", "--lmax", "1", "--smax", "2", "--grid", "0.5:1.5:0.5"]
        outs = []
        for name, workers in (("a.csv", 1), ("b.csv", 1), ("c.csv", 2)):
            path = tmp_path / name
            assert run(args + ["--out", str(path), "--workers", str(workers)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_json_format(self, tmp_path):
        out = tmp_path / "map.json"
        assert run(["map", "--lmax", "0", "--smax", "1", "--grid", "1:1:1",
                    "--format", "json", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data[0]["s_prime"] is None
        assert data[0]["y"] == pytest.approx(2.0, abs=1e-9)

    def test_empty_s_range_is_validation_error(self, capsys):
        assert run(["map", "--smax", "0"]) == 1
        assert "smax" in capsys.readouterr().err

    def test_total_failure_exit_code(self, monkeypatch, tmp_path):
        def boom(*args, **kwargs):
            raise RootSearchError("no roots")

        monkeypatch.setattr(cli, "map_ordinate", boom)
        code = run(["map", "--lmax", "0", "--smax", "1", "--grid", "1:1:1",
                    "--out", str(tmp_path / "x.csv")])
        assert code == 2


class TestResonanceCommand:
    def test_dd_series_values(self, tmp_path):
        out = tmp_path / "res.csv"
        assert run(["resonance", "--bc", "dd", "--moving", "outer", "--lmax", "0",
                    "--smax", "4", "--out", str(out)]) == 0
        rows = [r for r in csv.DictReader(out.open()) if r["s"] == "1"]
        xs = [float(r["x"]) for r in rows]
        ys = [float(r["y"]) for r in rows]
        assert xs == pytest.approx([2.0, 3.0, 4.0, 5.0], abs=1e-9)
        expected = [sp / (1 + sp) ** 2 for sp in (1, 2, 3, 4)]
        assert ys == pytest.approx(expected, abs=1e-9)

    def test_smax_zero_rejected(self, capsys):
        assert run(["resonance", "--smax", "0"]) == 1

    def test_mixed_series_first_point(self, tmp_path):
        out = tmp_path / "res.csv"
        assert run(["resonance", "--bc", "dn", "--lmax", "0", "--smax", "1",
                    "--out", str(out)]) == 0
        row = next(csv.DictReader(out.open()))
        assert float(row["x"]) == pytest.approx(0.742019, abs=2e-3)
        assert float(row["y"]) == pytest.approx(0.131596, abs=2e-3)


class TestParticlesCommand:
    def test_zero_amplitude_record(self, tmp_path, capsys):
        out = tmp_path / "p.json"
        assert run(["particles", "--bc", "dd", "--lmax", "0", "--smax", "1",
                    "--eps", "0", "--varpi", "6.28", "--duration", "1.0",
                    "--out", str(out)]) == 0
        rec = json.loads(out.read_text())
        assert rec["method"] == "perturbative"
        assert rec["results"][0]["n_per_mode"] == 0.0

    def test_missing_motion_flags(self, capsys):
        assert run(["particles", "--eps", "1e-3"]) == 1
        assert "varpi" in capsys.readouterr().err

    def test_round_trip_through_config_file(self, tmp_path):
        out1 = tmp_path / "a.json"
        argv = ["particles", "--bc", "dd", "--moving", "outer", "--ri", "1", "--ro", "2",
                "--lmax", "0", "--smax", "1", "--eps", "1e-4", "--varpi", "6.283185307",
                "--duration", "5.0", "--out", str(out1)]
        assert run(argv) == 0
        rec = json.loads(out1.read_text())
        cfg = tmp_path / "run.cfg"
        lines = [f"{k} = {v}" for k, v in rec["params"].items() if k != "command"]
        cfg.write_text("\n".join(lines) + "\n")
        out2 = tmp_path / "b.json"
        assert run(["particles", "--config", str(cfg), "--out", str(out2)]) == 0
        a = json.loads(out1.read_text())
        b = json.loads(out2.read_text())
        assert a["results"] == b["results"] and a["params"] == b["params"]

    def test_trajectory_csv_matches_perturbative(self, tmp_path):
        # general sampled trajectory fed through the CLI agrees with the
        # perturbative run at small amplitude
        eps, varpi = 1e-3, 2.0 * math.pi
        T = 16.0 / varpi
        t = np.linspace(0.0, T, 2048)
        r = 2.0 * (1.0 + eps * np.sin(varpi * t))
        rdot = 2.0 * eps * varpi * np.cos(varpi * t)
        traj = tmp_path / "traj.csv"
        with traj.open("w") as fh:
            fh.write("t,r,rdot\n")
            for row in zip(t, r, rdot):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        out_g = tmp_path / "gen.json"
        assert run(["particles", "--bc", "dd", "--lmax", "0", "--smax", "1",
                    "--trajectory", str(traj), "--sprime-max", "4",
                    "--out", str(out_g)]) == 0
        out_p = tmp_path / "pert.json"
        assert run(["particles", "--bc", "dd", "--lmax", "0", "--smax", "1",
                    "--eps", str(eps), "--varpi", str(varpi), "--duration", str(T),
                    "--sprime-max", "4", "--out", str(out_p)]) == 0
        n_g = json.loads(out_g.read_text())["results"][0]["n_per_mode"]
        n_p = json.loads(out_p.read_text())["results"][0]["n_per_mode"]
        assert json.loads(out_g.read_text())["method"] == "general"
        assert abs(n_g - n_p) / n_p < 1e-2

    def test_bad_geometry_is_validation_error(self, capsys):
        assert run(["particles", "--ri", "2", "--ro", "1", "--eps", "1e-3",
                    "--varpi", "1", "--duration", "1"]) == 1


def test_selftest_passes(capsys):
    assert run(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 8 and "FAIL" not in out
