import json
import os

import pytest

from tsirelson_greedy import reports
from tsirelson_greedy.cli import main, read_config
from tsirelson_greedy.reports import Report, atomic_write, make_rng, spawn_rngs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norm_prints_exact_value(capsys, tmp_path):
    code, out, _ = run(capsys, "norm", "--space", "tsirelson", "--vec", "[1,1,1,1,1,1]", "--out", str(tmp_path))
    # the oracle gives 3/2 (the subset {4,5,6} alone already reaches it)
    assert code == 0 and out.strip() == "3/2"
    doc = json.loads((tmp_path / "norm.json").read_text())
    assert doc["summary"]["value"] == "3/2" and doc["mode"]["arithmetic"] == "exact"
    assert doc["config"]["vec"] == "[1,1,1,1,1,1]" and "numpy" in doc["versions"]


def test_norm_float_space(capsys, tmp_path):
    code, out, _ = run(capsys, "norm", "--space", "lp(p=2)", "--vec", "[3,4]", "--out", str(tmp_path))
    assert code == 0 and float(out) == pytest.approx(5.0)


def test_dirichlet_example(capsys, tmp_path):
    code, _, _ = run(capsys, "dirichlet", "--lambda", "0.5", "--mmax", "200", "--out", str(tmp_path))
    doc = json.loads((tmp_path / "dirichlet.json").read_text())
    assert code == 0 and 0.15 <= doc["summary"]["slope"] <= 0.35


def test_oracle_check_small(capsys, tmp_path):
    code, _, _ = run(capsys, "oracle-check", "--n", "6", "--cases", "20", "--seed", "7", "--out", str(tmp_path))
    assert code == 0


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# continuum table\ncommand = continuum\nprefixes = 5\njmax = 6\nout = {tmp_path}\n")
    assert read_config(cfg)[0] == "continuum"
    code, _, _ = run(capsys, "--config", str(cfg))
    assert code == 0
    doc = json.loads((tmp_path / "continuum.json").read_text())
    assert doc["config"]["prefixes"] == 5 and doc["config"]["jmax"] == 6
    # command-line flags override the file
    code, _, _ = run(capsys, "--config", str(cfg), "continuum", "--jmax", "4")
    assert json.loads((tmp_path / "continuum.json").read_text())["config"]["jmax"] == 4


@pytest.mark.parametrize("argv", [
    ["norm", "--space", "lp(p=0)", "--vec", "[1]"],
    ["norm", "--space", "banach", "--vec", "[1]"],
    ["norm", "--vec", "[[1,2]]"],
    ["cond-params", "--space", "rot(a=0.5,dim=50)", "--witness-ms", "9:3"],
    ["cond-params", "--space", "rot(a=0.5,dim=10)", "--witness-ms", "2:8"],
    ["cond-params", "--witness-ms", "2:4"],
])
def test_config_errors_exit_2(capsys, tmp_path, argv):
    code, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert code == 2 and err.startswith("error:")


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("command continuum\n")
    assert run(capsys, "--config", str(cfg))[0] == 2
    assert run(capsys, "--config", str(tmp_path / "missing.cfg"), "continuum")[0] == 2


def test_invariant_violation_exit_1_and_report_written(capsys, tmp_path):
    base = tmp_path / "baseline.json"
    base.write_text(json.dumps({"constant": 1.0}))
    code, _, err = run(capsys, "square-split", "--n", "8", "--samples", "40", "--baseline", str(base),
                       "--out", str(tmp_path))
    assert code == 1 and "invariant violated" in err
    doc = json.loads((tmp_path / "square-split.json").read_text())
    assert doc["ok"] is False


def test_reports_are_deterministic(capsys, tmp_path):
    argv = ["square-split", "--n", "10", "--samples", "30", "--out", str(tmp_path)]
    names = ("square-split.json", "square-split.csv")
    outputs = []
    for seed in ("3", "3", "4"):
        assert run(capsys, *argv, "--seed", seed)[0] == 0
        outputs.append([(tmp_path / n).read_bytes() for n in names])
    assert outputs[0] == outputs[1]
    assert outputs[0][1] != outputs[2][1]


def test_atomic_write_leaves_no_temp_files(tmp_path, monkeypatch):
    target = tmp_path / "r.json"
    atomic_write(target, "one")
    assert target.read_text() == "one"

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(reports.os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write(target, "two")
    assert target.read_text() == "one"
    assert os.listdir(tmp_path) == ["r.json"]


def test_report_json_is_stable():
    rep = Report("x", {"b": 1, "a": 2}, summary={"v": 0.1})
    rep.check("fine", True)
    assert rep.json_text() == rep.json_text() and rep.ok
    assert list(json.loads(rep.json_text())["config"]) == ["a", "b"]


def test_rng_streams():
    assert make_rng(5).integers(0, 10**9) == make_rng(5).integers(0, 10**9)
    r1, r2 = spawn_rngs(5, 2)
    assert r1.integers(0, 10**9) != r2.integers(0, 10**9)


def test_missing_baseline_is_a_config_error(capsys, tmp_path):
    code, _, err = run(capsys, "square-split", "--n", "6", "--samples", "5", "--baseline",
                       str(tmp_path / "nope.json"), "--out", str(tmp_path))
    assert code == 2 and "baseline" in err
