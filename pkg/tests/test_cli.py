"""End-to-end CLI behaviour: exit codes, files, reproducibility."""
import json
import os

import numpy as np
import pytest

import motkit as mk
from motkit import cli


def run(argv):
    return cli.main(argv)


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def coil_config(**extra):
    doc = {
        "geometry": {
            "variant": "AntiHelmholtz",
            "parameters": {"radius": 50.0, "separation": 50.0,
                           "current": 100.0, "wire_diameter": 1.0},
            "discretization": {"segments_per_turn": 60},
        },
        "analysis": {"scan_points": 11, "plane_points": 5},
    }
    doc.update(extra)
    return doc


SIM_FILES = ["scan_x.csv", "scan_y.csv", "scan_z.csv",
             "plane_xy.csv", "plane_xz.csv", "plane_zy.csv", "report.json"]


def test_simulate_writes_all_outputs(tmp_path):
    cfg = write_config(tmp_path, coil_config())
    out = tmp_path / "out"
    assert run(["simulate", "--config", cfg, "--out", str(out)]) == 0
    for name in SIM_FILES:
        assert (out / name).exists()
    report = json.loads((out / "report.json").read_text())
    ratio = report["gradient_report"]["ratio"]
    assert ratio[1] == pytest.approx(1.0, abs=5e-3)
    assert ratio[2] == pytest.approx(-2.0, abs=1e-2)


def test_simulate_accepts_bundled_preset(tmp_path):
    out = tmp_path / "out"
    assert run(["simulate", "--config", "anti_helmholtz",
                "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["gradient_report"]["ratio"][2] == pytest.approx(-2.0, abs=1e-2)


def test_two_piece_preset_report(tmp_path):
    out = tmp_path / "out"
    assert run(["simulate", "--config", "two_piece", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    ratio = report["gradient_report"]["ratio"]
    assert -2.2 <= ratio[2] <= -1.6
    assert report["suitability"]["passed"] is True
    assert 0.05 <= report["power_report"]["total_power_W"] <= 1.0


def test_byte_identical_reruns(tmp_path):
    cfg = write_config(tmp_path, coil_config())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run(["simulate", "--config", cfg, "--out", str(out_a),
                "--threads", "1"]) == 0
    assert run(["simulate", "--config", cfg, "--out", str(out_b),
                "--threads", "1"]) == 0
    for name in SIM_FILES:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_unknown_config_key_is_exit_2(tmp_path):
    cfg = write_config(tmp_path, dict(coil_config(), surprise=1))
    assert run(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_bad_geometry_leaves_no_partial_output(tmp_path):
    doc = coil_config()
    doc["geometry"]["parameters"]["radius"] = -5.0
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert run(["simulate", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists() or not list(out.iterdir())


def test_unusable_output_directory_is_exit_2(tmp_path):
    cfg = write_config(tmp_path, coil_config())
    blocker = tmp_path / "not_a_dir"
    blocker.write_text("occupied")
    assert run(["simulate", "--config", cfg, "--out", str(blocker)]) == 2


def test_missing_config_file_is_exit_2(tmp_path):
    assert run(["simulate", "--config", str(tmp_path / "nope.json"),
                "--out", str(tmp_path / "o")]) == 2


def test_optimize_requires_objective(tmp_path):
    cfg = write_config(tmp_path, coil_config())
    assert run(["optimize", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_optimize_writes_result_and_trace(tmp_path):
    doc = coil_config(objective={
        "target_gradient_Gcm": 10.0,
        "weights": {"w_mag": 1.0, "w_ratio": 0.0, "w_power": 0.0},
        "bounds_mm": {"separation": [30.0, 80.0]},
    })
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert run(["optimize", "--config", cfg, "--out", str(out),
                "--budget", "15"]) == 0
    result = json.loads((out / "opt_result.json").read_text())
    assert 0.030 <= result["best_parameters"]["separation"] <= 0.080
    trace = (out / "opt_trace.csv").read_text().strip().split("\n")
    assert trace[0] == "eval,objective,separation"
    assert len(trace) == 1 + result["evaluations"]


def test_optimize_infeasible_start_is_exit_3(tmp_path):
    doc = {
        "geometry": {"variant": "TwoPiece", "parameters": {}},
        "objective": {
            "beam_diameter_mm": 16.0,
            "bounds_mm": {"height": [30.0, 50.0]},
        },
    }
    cfg = write_config(tmp_path, doc)
    assert run(["optimize", "--config", cfg, "--out", str(tmp_path / "o"),
                "--budget", "3"]) == 3


def test_scale_table_and_errors(tmp_path, capsys):
    assert run(["scale", "4"]) == 0
    out = capsys.readouterr().out
    assert "current" in out and "8" in out
    assert run(["scale", "-1"]) == 2
    out_dir = tmp_path / "s"
    assert run(["scale", "2", "--out", str(out_dir)]) == 0
    doc = json.loads((out_dir / "scaling.json").read_text())
    assert doc["ratios"]["gradient"] == pytest.approx(2.0 ** -1.5)


def test_export_square_loop(tmp_path):
    doc = {"geometry": {"variant": "FreePath", "parameters": {
        "points": [[0, 0, 0], [10, 0, 0], [10, 10, 0], [0, 10, 0]],
        "current": 1.0, "closed": True}}}
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert run(["export", "--config", cfg, "--out", str(out)]) == 0
    text = (out / "geometry.obj").read_text()
    lines = text.strip().split("\n")
    assert sum(1 for l in lines if l.startswith("v ")) == 4
    assert sum(1 for l in lines if l.startswith("l ")) == 4


def test_export_two_piece_has_two_groups(tmp_path):
    out = tmp_path / "out"
    assert run(["export", "--config", "two_piece", "--out", str(out)]) == 0
    text = (out / "geometry.obj").read_text()
    groups = [l.split()[1] for l in text.splitlines() if l.startswith("o ")]
    assert groups == ["piece_a", "piece_b"]


def test_obj_round_trip_reproduces_fields(tmp_path):
    doc = {"geometry": {"variant": "FreePath", "parameters": {
        "points": [[0, 0, 0], [40, 0, 0], [40, 40, 0], [0, 40, 0]],
        "current": 2.0, "closed": True}}}
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert run(["export", "--config", cfg, "--out", str(out)]) == 0
    segs = mk.build(cli.load_config(cfg)["geometry"])
    back = cli.import_obj((out / "geometry.obj").read_text(),
                          currents={"path": 2.0})
    p = np.array([0.02, 0.02, 0.01])
    b0, b1 = mk.field_at(segs, p), mk.field_at(back, p)
    assert np.max(np.abs(b1 - b0)) <= 1e-9 * np.linalg.norm(b0)


def test_all_presets_load_and_build():
    for name in ("anti_helmholtz", "twisted_cage", "compact_four", "two_piece"):
        cfg = cli.load_config(name)
        segs = mk.build(cfg["geometry"])
        assert len(segs) > 0


def test_unknown_preset_name_is_exit_2(tmp_path):
    assert run(["simulate", "--config", "no_such_preset",
                "--out", str(tmp_path / "o")]) == 2
