import json

import pytest

from solenoid_kms import campaigns as cp
from solenoid_kms.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_measure_mr_arc(capsys):
    code, out = run(capsys, "measure", "mr", "--r", "1.3862944", "--arc", "0,0.5")
    assert code == 0 and out.strip() == "0.6666667"


def test_measure_subinv_lebesgue(capsys):
    code, out = run(capsys, "measure", "subinv", "--r", "0", "--measure", "lebesgue", "--json")
    rec = json.loads(out)[0]
    assert code == 0 and rec["pass"] and rec["max_residual"] == 0.0


def test_measure_subinv_failure_has_witness(capsys):
    code, out = run(capsys, "measure", "subinv", "--r", "2", "--measure", "reversed")
    assert code == 1 and "FAIL" in out and "witness" in out


def test_l1_curve(capsys):
    code, out = run(capsys, "measure", "l1-curve", "--r", "1", "--n-max", "6")
    rows = [line.split(",") for line in out.splitlines()[1:7]]
    vals = [float(v) for _, v in rows]
    assert code == 0 and all(b < a for a, b in zip(vals, vals[1:]))


def test_measure_decompose_and_probe(capsys, tmp_path):
    code, out = run(capsys, "measure", "decompose", "--r", "2", "--shift", "0.25", "--n", "2")
    assert code == 0 and "lambda[1] = 1" in out
    code, out = run(capsys, "measure", "probe", "--r", "2", "--n", "4")
    assert code == 0 and out.strip() == "ForcedEqual"
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"pieces": [[0.0, 1.0, 1.0, 0.0]]}))
    code, out = run(capsys, "measure", "subinv", "--r", "0", "--measure-file", str(path))
    assert code == 0


def test_cycle_commands(capsys):
    code, out = run(capsys, "cycle", "vectors", "--n", "1", "--r", "1.3862944")
    assert out.split() == ["0.6666667,0.3333333", "0.3333333,0.6666667"]
    code, out = run(capsys, "cycle", "decompose", "--n", "1", "--r", "1.3862944", "--x", "0.5,0.5")
    assert code == 0 and out.strip() == "0.5000000,0.5000000"
    code, out = run(capsys, "cycle", "decompose", "--x", "0.9,0.1")
    assert code == 1 and "NotSubinvariant index 1" in out


def test_kms_eval(capsys):
    code, out = run(capsys, "kms", "eval", "--expr", "S^1 [] S*^1", "--level", "0", "--beta", "1", "--solenoid", "0,0,0")
    assert code == 0 and out.strip() == "0.3678794"


def test_kms_verify_small(capsys):
    code, out = run(capsys, "kms", "verify", "--N", "2", "--theta0", "0.3333333", "--beta", "1", "--depth", "3", "--samples", "50", "--states", "4", "--seed", "42")
    assert code == 0
    assert "PASS kms-identity" in out and "FAIL" not in out


def test_factor_test(capsys):
    code, out = run(capsys, "kms", "factor-test", "--beta", "0")
    assert out.splitlines()[0] == "true" and code == 0
    code, out = run(capsys, "kms", "factor-test", "--beta", "1", "--states", "3")
    assert out.splitlines()[0] == "false" and code == 0


def test_negative_beta_is_a_failing_report(capsys):
    code, out = run(capsys, "kms", "trace0", "--beta", "-1")
    assert code == 1 and "no-kms-states" in out and "beta < 0" in out


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"beta": 0.5, "samples": 20, "states": 2, "depth": 2}))
    code, out = run(capsys, "kms", "verify", "--config", str(cfg), "--beta", "2", "--json")
    recs = json.loads(out)
    assert code == 0 and recs[0]["parameters"]["beta"] == 2.0 and recs[0]["cases"] == 40
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(SystemExit):
        main(["kms", "verify", "--config", str(cfg)])


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv(cp.SEED_ENV, "1234")
    assert cp.RunConfig().seed == 1234


def test_run_config_validation():
    with pytest.raises(ValueError):
        cp.RunConfig(n=15)
    with pytest.raises(ValueError):
        cp.RunConfig(samples=0)


def test_zero_case_report_fails():
    assert not cp.Report("empty", {}, 0.0, 1.0, 0).passed
    assert cp.Report("one", {}, 0.5, 1.0, 1).passed


def _strip_times(path):
    recs = json.loads(path.read_text())
    for r in recs:
        r.pop("wall_time_ms")
    return recs


def test_report_is_deterministic(tmp_path, capsys):
    args = ["report", "--beta", "1", "--depth", "2", "--samples", "20", "--states", "2", "--seed", "7", "--n", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    csv_path = tmp_path / "d.csv"
    assert main(args + ["--out", str(a), "--density-csv", str(csv_path), "--points", "8"]) == 0
    assert main(args + ["--out", str(b)]) == 0
    capsys.readouterr()
    ra, rb = _strip_times(a), _strip_times(b)
    assert ra == rb
    assert [r["name"] for r in ra] == sorted(r["name"] for r in ra)
    assert all(set(r) >= {"name", "parameters", "max_residual", "pass", "witnesses", "wall_time_ms"} | {"cases"} for r in json.loads(a.read_text()))
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "measure,t,density" and len(lines) == 1 + 3 * 8


def test_report_io_error(tmp_path, capsys):
    code = main(["report", "--beta", "0", "--depth", "1", "--samples", "5", "--out", str(tmp_path / "missing" / "r.json")])
    assert code == 2
    assert "cannot write" in capsys.readouterr().err
