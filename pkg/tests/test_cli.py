import json
import subprocess
import sys

import pytest

from halman import Box, Instance, PointRecord, gen_colorful_lower, gen_mono_lower, gen_pq_lower
from halman.cli import main, verify_report
from halman.io import dumps, save_instance


@pytest.fixture
def files(tmp_path):
    def write(name, inst):
        path = tmp_path / name
        save_instance(inst, path)
        return str(path)
    return write


def run(*argv):
    return main([str(a) for a in argv])


def report(path):
    return json.loads(open(path).read())


def test_check_exit_codes(files, tmp_path):
    lower = files("lower.json", gen_colorful_lower(2, 1))
    out = tmp_path / "r.json"
    assert run("check", "--instance", lower, "--n", 1, "--out", out) == 0
    assert run("check", "--instance", lower, "--n", 2, "--out", out) == 1
    rep = report(out)
    assert rep["verdicts"][0]["verdict"] == "fails"
    assert rep["certificates"][0]["kind"] == "violation"
    assert run("check", "--instance", lower, "--budget", 3, "--out", out) == 2


def test_check_subfamily_and_pq(files, tmp_path):
    half = files("half.json", gen_mono_lower(2, 1))
    out = tmp_path / "r.json"
    assert run("check", "--instance", half, "--mode", "subfamily", "--k", 4, "--n", 1, "--out", out) == 1
    assert run("check", "--instance", half, "--mode", "subfamily", "--k", 3, "--n", 1, "--out", out) == 0
    pq = files("pq.json", gen_pq_lower(2))
    assert run("check", "--instance", pq, "--mode", "pq", "--p", 2, "--q", 2, "--out", out) == 0


def test_malformed_input_exit_3(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 1, "families": [[[[0.5, 1]]]]}')
    assert run("check", "--instance", bad) == 3
    bad.write_text("{oops")
    assert run("solve", "--instance", bad) == 3
    assert run("solve", "--instance", tmp_path / "missing.json") == 3


def test_bad_arguments_exit_3(files):
    lower = files("lower.json", gen_colorful_lower(2, 1))
    with pytest.raises(SystemExit) as exc:
        run("check", "--instance", lower, "--mode", "nonsense")
    assert exc.value.code == 3
    assert run("check", "--instance", lower, "--n", 0) == 3


def test_solve(files, tmp_path):
    out = tmp_path / "r.json"
    assert run("solve", "--instance", files("h.json", gen_mono_lower(2, 2)), "--k", 2, "--out", out) == 0
    assert report(out)["optima"][0]["optimum"] == 3
    one = Instance(1, ((Box.from_bounds((0, 1)),),), (PointRecord((0,), 5),))
    assert run("solve", "--instance", files("one.json", one), "--k", 3, "--out", out) == 0
    assert report(out)["optima"][0]["optimum"] == 3
    assert run("solve", "--instance", files("pq.json", gen_pq_lower(2)), "--out", out) == 0
    assert report(out)["optima"][0]["optimum"] == 3


def test_solve_family_selector_and_cover_mode(files, tmp_path):
    out = tmp_path / "r.json"
    lower = files("lower.json", gen_colorful_lower(2, 1))
    run("solve", "--instance", lower, "--family", 2, "--out", out)
    assert [o["family"] for o in report(out)["optima"]] == [2]
    run("solve", "--instance", lower, "--mode", "cover", "--k", 2, "--out", out)
    assert len(report(out)["optima"]) == 3


def test_witness(files, tmp_path):
    out = tmp_path / "r.json"
    lower = files("lower3.json", gen_colorful_lower(3, 4))
    assert run("witness", "--instance", lower, "--n", 4, "--out", out) == 0
    w = report(out)["witness"]
    assert w["size"] <= 8 and w["bound"] == 8
    assert run("witness", "--instance", lower, "--n", 5, "--out", out) == 1
    cert = report(out)["certificates"][0]
    assert cert["kind"] == "violation" and cert["count"] < 5


def test_witness_mono(files, tmp_path):
    out = tmp_path / "r.json"
    half = files("half.json", gen_mono_lower(2, 3))
    assert run("witness", "--instance", half, "--variant", "mono", "--n", 3, "--out", out) == 0
    assert report(out)["witness"]["size"] <= 6


def test_reduce(files, tmp_path):
    out, red = tmp_path / "r.json", tmp_path / "red.json"
    lower = files("lower.json", gen_colorful_lower(2, 1))
    assert run("reduce", "--instance", lower, "--t", 1, "--out", out, "--reduced", red) == 0
    rep = report(out)
    assert rep["reduced_instance"]["dimension"] == 1
    assert json.loads(red.read_text())["dimension"] == 1
    pq = files("pq.json", gen_pq_lower(2))
    assert run("reduce", "--instance", pq, "--variant", "corollary", "--k", 2, "--out", out) == 0
    assert report(out)["corollary"]["tau_original"] == 3
    assert run("reduce", "--instance", pq, "--variant", "corollary") == 3


def test_generate_stdout_matches_library(capsys):
    assert run("generate", "colorful-lower", "--d", 2, "--n", 1) == 0
    assert capsys.readouterr().out == dumps(gen_colorful_lower(2, 1))
    assert run("generate", "random-colorful", "--d", 2, "--seed", 9, "--structured") == 0
    assert run("generate", "random-mono", "--d", 2, "--size", 6, "--k", 2) == 0


def test_explore_zero_trials(tmp_path):
    out = tmp_path / "r.json"
    assert run("explore", "--problem", "P4.1", "--trials", 0, "--out", out) == 0
    ex = report(out)["explore"]
    assert ex["max_observed"] is None and ex["candidates"] == []


def test_every_report_verifies(files, tmp_path):
    lower = files("lower.json", gen_colorful_lower(2, 1))
    half = files("half.json", gen_mono_lower(2, 2))
    runs = [
        ("check", "--instance", lower, "--n", 2),
        ("check", "--instance", half, "--mode", "subfamily", "--k", 4),
        ("solve", "--instance", half, "--k", 2),
        ("witness", "--instance", lower),
        ("witness", "--instance", lower, "--n", 3),
        ("reduce", "--instance", lower),
        ("explore", "--problem", "planar-pairwise", "--trials", 20),
    ]
    for i, argv in enumerate(runs):
        out = tmp_path / f"r{i}.json"
        run(*argv, "--out", out)
        assert verify_report(report(out)) == [], argv
        assert run("verify", out) == 0


def test_verify_detects_tampering(files, tmp_path):
    out = tmp_path / "r.json"
    run("solve", "--instance", files("h.json", gen_mono_lower(2, 2)), "--k", 2, "--out", out)
    rep = report(out)
    rep["certificates"][0]["copies"] = rep["certificates"][0]["copies"][1:]
    rep["optima"][0]["optimum"] = 2
    problems = verify_report(rep)
    assert any("certificate" in p for p in problems)
    assert any("optima" in p for p in problems)
    out.write_text(json.dumps(rep))
    assert run("verify", out) == 1
    out.write_text("[]")
    assert run("verify", out) == 3


def test_module_entry_point(files):
    lower = files("lower.json", gen_colorful_lower(2, 1))
    proc = subprocess.run([sys.executable, "-m", "halman", "check", "--instance", lower], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdicts"][0]["verdict"] == "holds"
