import csv
import json
import subprocess
import sys

import pytest

from kdsmodes.cli import csv_text, json_text, main, sha256_file


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def _run(tmp_path, command, config_text, out="out"):
    cfg = _write(tmp_path, config_text)
    code = main([command, "--config", str(cfg), "--out", str(tmp_path / out), "--quiet"])
    return code, tmp_path / out


SCHW = "[params]\na = 0.0\nm = 1.0\nLambda = 0.0\n"
SDS = "[params]\na = 0.0\nm = 1.0\nLambda = 0.02\n"


def test_serialization_is_stable():
    assert json_text({"b": 1.0, "a": [float("nan"), 1e-300]}) == (
        '{\n  "a": [\n    null,\n    1e-300\n  ],\n  "b": 1.0\n}\n')
    assert csv_text(["x", "y"], [(0.1, 2)]) == "x,y\n0.1,2\n"
    assert repr(0.1 + 0.2) in csv_text(["x"], [(0.1 + 0.2,)])


def test_horizons_schwarzschild(tmp_path):
    code, out = _run(tmp_path, "horizons", SCHW)
    assert code == 0
    rep = json.loads((out / "horizons.json").read_text())
    assert rep["roots"]["r_e"] == pytest.approx(2.0, abs=1e-12)
    assert rep["roots"]["r_c"] is None
    assert abs(rep["horizons"]["event"]["kappa_geom"]) == pytest.approx(0.25, rel=1e-6)


def test_horizons_rerun_is_byte_identical(tmp_path):
    _, out = _run(tmp_path, "horizons", SDS)
    first = (out / "horizons.json").read_bytes()
    _, out = _run(tmp_path, "horizons", SDS)
    assert (out / "horizons.json").read_bytes() == first


def test_extremal_config_exits_with_parameter_error(tmp_path, capsys):
    code, _ = _run(tmp_path, "horizons", "[params]\na = 1.0\nm = 1.0\nLambda = 0.0\n")
    assert code == 2
    assert "DegenerateRoots" in capsys.readouterr().err


def test_unknown_key_exits_with_parameter_error(tmp_path, capsys):
    code, _ = _run(tmp_path, "horizons", "[params]\nspin = 0.1\n")
    assert code == 2
    assert "unknown" in capsys.readouterr().err


def test_qnm_without_cosmological_constant_is_unsupported(tmp_path, capsys):
    code, _ = _run(tmp_path, "qnm", SCHW)
    assert code == 3
    assert "LambdaZeroUnsupported" in capsys.readouterr().err


def test_qnm_empty_window_writes_header_only(tmp_path):
    text = SDS + "[solver]\nN_r = 16\nN_theta = 8\nwindow = { re_min = 5.0, re_max = 6.0, im_min = 5.0, im_max = 6.0 }\n"
    code, out = _run(tmp_path, "qnm", text)
    assert code == 0
    assert (out / "spectrum.csv").read_bytes() == b"k,re_sigma,im_sigma,residual,refinement_agreement\n"


def test_qnm_nominal_run_matches_oracle(tmp_path):
    code, out = _run(tmp_path, "qnm", SDS)
    assert code == 0
    summary = json.loads((out / "qnm.json").read_text())
    assert summary["oracle"]["max_distance"] < 1e-6
    assert summary["modes"]["0"]["all_analytic_consistent"]
    with open(out / "spectrum.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == summary["modes"]["0"]["count"]
    assert all(float(r["residual"]) < 1e-8 for r in rows)
    assert (out / "eigenfunction_k0_0.csv").exists()
    assert b"\r\n" not in (out / "spectrum.csv").read_bytes()


def test_radial_points_outputs_and_determinism(tmp_path):
    code, out = _run(tmp_path, "radial-points", "[params]\na = 0.1\nm = 1.0\nLambda = 0.02\n")
    assert code == 0
    rep = json.loads((out / "radial_points.json").read_text())
    ev, co = rep["horizons"]["event"], rep["horizons"]["cosmological"]
    assert ev["max_rel_error"] < 1e-6 and co["max_rel_error"] < 1e-6
    first = {name: (out / name).read_bytes() for name in ("radial_points.json", "trajectories.csv")}
    code, out = _run(tmp_path, "radial-points", "[params]\na = 0.1\nm = 1.0\nLambda = 0.02\n")
    assert all((out / name).read_bytes() == data for name, data in first.items())


def test_radial_points_error_path(tmp_path):
    code, _ = _run(tmp_path, "radial-points", "[params]\na = 2.0\nm = 1.0\nLambda = 0.02\n")
    assert code == 2


def test_manifest_digests_match_outputs(tmp_path):
    for command in ("horizons", "gnc-check", "analyticity"):
        code, out = _run(tmp_path, command, SDS)
        assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["commands"]) == {"horizons", "gnc-check", "analyticity"}
    assert manifest["files"]
    for name, digest in manifest["files"].items():
        assert sha256_file(out / name) == digest
    assert manifest["config"]["params"]["Lambda"] == 0.02


def test_geometry_check_summary(tmp_path):
    code, out = _run(tmp_path, "geometry-check", SDS + "[geometry]\nn_points = 20\n")
    assert code == 0
    rep = json.loads((out / "geometry.json").read_text())
    assert all(rep["summary"].values())


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "kdsmodes.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "kdsmodes" in proc.stdout
