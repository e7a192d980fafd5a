"""End-to-end CLI runs: files, schemas, exit codes, byte determinism."""

import contextlib
import csv
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from gtra.cli import main, parse_values


@contextlib.contextmanager
def np_warnings_suppressed():
    with np.errstate(over="ignore", invalid="ignore"):
        yield

FAST_GA = {"population_size": 40, "generations": 60, "stall_generations": 20}


def write_config(tmp_path: Path, name: str, doc: dict) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return path


def scenario_doc(**overrides) -> dict:
    doc = {
        "scenario": "HighSec",
        "n": 6,
        "gamma": 0.1,
        "alpha": 0.8,
        "lambda": 1.5,
        "instances": 3,
        "seed": 31337,
        "trials": 200,
        "times": 2,
        "ga": dict(FAST_GA),
    }
    doc.update(overrides)
    return doc


def read_csv(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestSolve:
    def test_happy_path(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(n=6))
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "q_star.csv").exists()
        assert (out / "summary.csv").exists()
        assert (out / "manifest.json").exists()
        header, rows = read_csv(out / "q_star.csv")
        assert header == ["target_id", "q", "consumption"]
        assert len(rows) == 6
        s_header, s_rows = read_csv(out / "summary.csv")
        assert s_header == ["defender_utility", "attacker_utility", "consumption", "iterations"]
        assert len(s_rows) == 1

    def test_fifty_target_run(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(n=50))
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        _, rows = read_csv(out / "q_star.csv")
        assert len(rows) == 50
        assert [int(r[0]) for r in rows] == list(range(1, 51))

    def test_gamma_out_of_range_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(gamma=1.5))
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        err = capsys.readouterr().err
        assert "gamma" in err and "1.5" in err

    def test_malformed_json_is_line_precise(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "scenario": "HighSec",\n  "n": 6,,\n}\n', encoding="utf-8")
        assert main(["solve", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
        err = capsys.readouterr().err
        assert "bad.json:3:" in err

    def test_unknown_key_rejected(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(bogus=1))
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_desk_scale_cap(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(n=500))
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "paper-scale" in capsys.readouterr().err

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc())
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["solve", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["solve", "--config", str(cfg), "--out", str(out2)]) == 0
        assert (out1 / "q_star.csv").read_bytes() == (out2 / "q_star.csv").read_bytes()
        assert (out1 / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()

    def test_numeric_failure_exits_3(self, tmp_path, capsys):
        # precision so large the softmax exponent overflows to non-finite
        doc = scenario_doc(scenario="CmGreater", **{"lambda": 1e308})
        cfg = write_config(tmp_path, "cfg.json", doc)
        with np_warnings_suppressed():
            assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
        assert "non-finite" in capsys.readouterr().err

    def test_manifest_contents(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc())
        out = tmp_path / "out"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["master_seed"] == 31337
        assert manifest["outputs"] == ["q_star.csv", "summary.csv"]
        assert len(manifest["config_digest"]) == 16
        assert manifest["columns"]["q_star.csv"] == ["target_id", "q", "consumption"]
        assert manifest["config"]["trials"] == 200


class TestCompare:
    def run(self, tmp_path, doc, out_name="out", threads=1):
        cfg = write_config(tmp_path, "cfg.json", doc)
        out = tmp_path / out_name
        code = main(
            ["compare", "--config", str(cfg), "--out", str(out), "--threads", str(threads)]
        )
        assert code == 0
        return out

    def test_row_count_and_schema(self, tmp_path):
        out = self.run(tmp_path, scenario_doc())
        header, rows = read_csv(out / "comparison.csv")
        assert header[:3] == ["n", "instance", "strategy"]
        assert "defender_utility" in header and "attacker_utility" in header
        assert len(rows) == 3 * 5 + 5  # instances x strategies + mean rows

    def test_allones_rows_exact(self, tmp_path):
        out = self.run(tmp_path, scenario_doc())
        header, rows = read_csv(out / "comparison.csv")
        cols = {name: i for i, name in enumerate(header)}
        allones = [r for r in rows if r[cols["strategy"]] == "AllOneS" and r[cols["instance"]] != "mean"]
        assert allones
        for row in allones:
            assert float(row[cols["vulnerability"]]) == -1.0
            assert float(row[cols["coverage"]]) == 1.0

    def test_ne_consumption_within_budget(self, tmp_path):
        out = self.run(tmp_path, scenario_doc())
        header, rows = read_csv(out / "comparison.csv")
        cols = {name: i for i, name in enumerate(header)}
        budget = 0.1 * 6
        for row in rows:
            if row[cols["strategy"]] == "NE" and row[cols["instance"]] != "mean":
                assert float(row[cols["consumption"]]) <= budget + 1e-9
                assert row[cols["feasible"]] == "true"

    def test_n_list_and_svg_consistency(self, tmp_path):
        out = self.run(tmp_path, scenario_doc(n=[4, 6]))
        header, rows = read_csv(out / "comparison.csv")
        cols = {name: i for i, name in enumerate(header)}
        assert len(rows) == 2 * (3 * 5 + 5)
        svg = out / "defender_utility_vs_n.svg"
        root = ET.parse(svg).getroot()  # valid XML
        ns = {"s": "http://www.w3.org/2000/svg"}
        polylines = root.findall(".//s:polyline[@data-label]", ns)
        by_label = {p.get("data-label"): p.get("data-points") for p in polylines}
        mean_rows = [r for r in rows if r[cols["instance"]] == "mean"]
        for strategy in ("NE", "AllOneS", "Rand"):
            expected = {
                float(r[cols["n"]]): float(r[cols["defender_utility"]])
                for r in mean_rows
                if r[cols["strategy"]] == strategy
            }
            got = {}
            for pair in by_label[strategy].split():
                x, y = pair.split(",")
                got[float(x)] = float(y)
            assert got == pytest.approx(expected)

    def test_thread_counts_byte_identical(self, tmp_path):
        out1 = self.run(tmp_path, scenario_doc(), "t1", threads=1)
        out8 = self.run(tmp_path, scenario_doc(), "t8", threads=8)
        assert (out1 / "comparison.csv").read_bytes() == (out8 / "comparison.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc())
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        assert main(["compare", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["compare", "--config", str(cfg), "--out", str(out2), "--seed", "99"]) == 0
        assert (out1 / "comparison.csv").read_bytes() != (out2 / "comparison.csv").read_bytes()


class TestSweep:
    def test_parse_values(self):
        assert parse_values("0:1:0.1") == pytest.approx([0.1 * k for k in range(11)])
        assert parse_values("0:15:0.5") == pytest.approx([0.5 * k for k in range(31)])
        assert parse_values("1,2,3.5") == [1.0, 2.0, 3.5]
        assert parse_values("0.8") == [0.8]

    def test_unknown_axis_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc())
        code = main(
            ["sweep", "--config", str(cfg), "--out", str(tmp_path / "o"), "--axis", "zeta", "--values", "1:3:1"]
        )
        assert code == 2
        assert "axis" in capsys.readouterr().err

    def test_alpha_sweep_schema_and_grid(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(instances=2))
        out = tmp_path / "out"
        code = main(
            ["sweep", "--config", str(cfg), "--out", str(out), "--axis", "alpha", "--values", "0:1:0.5"]
        )
        assert code == 0
        header, rows = read_csv(out / "sweep.csv")
        assert header[:5] == ["axis", "value", "n", "instance", "strategy"]
        assert "defender_utility" in header and "attacker_utility" in header
        values = {r[1] for r in rows}
        assert len(values) == 3  # grid points 0, 0.5, 1
        assert len(rows) == 3 * (2 * 5 + 5)
        root = ET.parse(out / "utilities_vs_alpha.svg").getroot()
        assert root.tag.endswith("svg")
        # plot series regenerate from the CSV's NE mean rows
        cols = {name: i for i, name in enumerate(header)}
        ne_means = {
            float(r[cols["value"]]): (
                float(r[cols["defender_utility"]]),
                float(r[cols["attacker_utility"]]),
            )
            for r in rows
            if r[cols["instance"]] == "mean" and r[cols["strategy"]] == "NE"
        }
        polylines = {
            p.get("data-label"): p.get("data-points")
            for p in root.iter()
            if p.get("data-label")
        }
        for label, which in (("defender utility", 0), ("attacker utility", 1)):
            got = {}
            for pair in polylines[label].split():
                x, y = pair.split(",")
                got[float(x)] = float(y)
            assert got == pytest.approx({v: u[which] for v, u in ne_means.items()})

    def test_budget_fraction_sweep(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc(instances=2, times=1))
        out = tmp_path / "out"
        code = main(
            ["sweep", "--config", str(cfg), "--out", str(out), "--axis", "budget_fraction", "--values", "0:1:0.5"]
        )
        assert code == 0
        header, rows = read_csv(out / "sweep.csv")
        assert {r[0] for r in rows} == {"budget_fraction"}


class TestDynamics:
    def dynamics_doc(self, **target_overrides):
        target = {
            "attack_reward": 2.0,
            "attack_penalty": 1.0,
            "defense_cost": 0.3,
            "attack_cost": 0.5,
        }
        target.update(target_overrides)
        return {
            "target": target,
            "alpha": 0.8,
            "grid": 2,
            "dt": 0.05,
            "max_steps": 200,
            "tol": 1e-9,
        }

    def test_outputs_and_equilibrium(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", self.dynamics_doc())
        out = tmp_path / "out"
        assert main(["dynamics", "--config", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out / "payoffs.csv")
        assert header == ["a", "b", "c", "d", "f"]
        assert [float(v) for v in rows[0]] == pytest.approx([-0.9, 0.1, 1.5, -2.0, -0.3])
        _, eq_rows = read_csv(out / "equilibrium.csv")
        assert float(eq_rows[0][0]) == pytest.approx(0.125)
        assert float(eq_rows[0][1]) == pytest.approx(0.625)
        header, t_rows = read_csv(out / "trajectories.csv")
        assert header == ["trajectory", "t", "p", "q"]
        assert {r[0] for r in t_rows} == {"0", "1", "2", "3"}
        for row in t_rows:
            assert 0.0 <= float(row[2]) <= 1.0
            assert 0.0 <= float(row[3]) <= 1.0
        root = ET.parse(out / "phase.svg").getroot()
        labels = {p.get("data-label") for p in root.iter() if p.get("data-label")}
        assert "equilibrium" in labels

    def test_absent_equilibrium(self, tmp_path):
        # attack dominant for every q: both a and c positive
        cfg = write_config(
            tmp_path, "cfg.json", self.dynamics_doc(attack_reward=9.0, attack_penalty=0.5, attack_cost=0.1)
        )
        out = tmp_path / "out"
        assert main(["dynamics", "--config", str(cfg), "--out", str(out)]) == 0
        _, eq_rows = read_csv(out / "equilibrium.csv")
        assert eq_rows[0] == ["absent", "absent"]

    def test_rerun_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, "cfg.json", self.dynamics_doc())
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["dynamics", "--config", str(cfg), "--out", str(a)]) == 0
        assert main(["dynamics", "--config", str(cfg), "--out", str(b)]) == 0
        for name in ("payoffs.csv", "equilibrium.csv", "trajectories.csv", "phase.svg"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestEnvOverrides:
    def test_threads_env(self, tmp_path, monkeypatch, capsys):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc())
        monkeypatch.setenv("GTRA_THREADS", "not-a-number")
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "GTRA_THREADS" in capsys.readouterr().err

    def test_out_dir_env(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, "cfg.json", scenario_doc())
        env_out = tmp_path / "env_out"
        monkeypatch.setenv("GTRA_OUT_DIR", str(env_out))
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "ignored")]) == 0
        assert (env_out / "q_star.csv").exists()
        assert not (tmp_path / "ignored").exists()
