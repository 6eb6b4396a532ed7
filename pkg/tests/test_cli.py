import json
import shutil

import pytest

from microgrid_sizer.cli import main

from .conftest import WEEK_CONFIG


@pytest.fixture
def config(tmp_path):
    d = tmp_path / "scenario"
    shutil.copytree(WEEK_CONFIG.parent, d)
    return d / "scenario.toml"


def run(*argv):
    return main([str(a) for a in argv])


def test_simulate_writes_metrics(config, tmp_path, capsys):
    out = tmp_path / "sim"
    assert run("simulate", "--config", config, "--wind", 4, "--solar", 0, "--battery", 1,
               "--out", out, "--dump-steps") == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["embodied_tco2"] == 4649
    assert (out / "steps.csv").read_text().count("\n") == 7 * 24 + 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "simulate" and len(manifest["config_sha256"]) == 64
    assert json.loads(capsys.readouterr().out)["embodied_tco2"] == 4649


def test_validate_has_no_outputs(config, tmp_path):
    out = tmp_path / "nothing"
    assert run("validate", "--config", config) == 0
    assert not out.exists() and not (tmp_path / "results").exists()


def test_exit_codes(config, tmp_path):
    assert run("bogus") == 1
    assert run("simulate") == 1
    assert run("simulate", "--config", tmp_path / "missing.toml") == 2
    bad = tmp_path / "bad.toml"
    bad.write_text(config.read_text() + "\n[solar]\nlosses = 1.5\n")
    assert run("validate", "--config", bad) == 2
    assert run("simulate", "--config", config, "--wind", -1, "--out", tmp_path / "x") == 2


def test_optimize_is_byte_identical(config, tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert run("optimize", "--config", config, "--seed", 42, "--out", out) == 0
    for name in ("front.json", "evaluations.csv", "pareto.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_candidates_and_project_pipeline(config, tmp_path):
    ex = tmp_path / "ex"
    assert run("exhaustive", "--config", config, "--out", ex) == 0
    assert (ex / "coverage_grid.csv").read_text().count("\n") == 11 * 11 + 1
    cand = tmp_path / "cand"
    assert run("candidates", "--config", config, "--front", ex / "front.json",
               "--method", "greedy", "-k", 3, "--out", cand) == 0
    assert (cand / "candidates.csv").read_text().count("\n") == 4
    proj = tmp_path / "proj"
    assert run("project", "--config", config, "--candidates", cand / "candidates.csv",
               "--horizon-days", 100, "--out", proj) == 0
    assert (proj / "projection.csv").read_text().count("\n") == 102
    json.loads((proj / "crossovers.json").read_text())
