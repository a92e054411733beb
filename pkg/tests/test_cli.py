import json
import math
import subprocess
import sys

import pytest

from ringwell.cli import Report, main, parse_angle, parse_args, run
from ringwell.overlap import closed_form_coeff


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("token, value", [
    ("pi/8", math.pi / 8), ("pi/4", math.pi / 4), ("3pi/8", 3 * math.pi / 8),
    ("0.7853981633974483", math.pi / 4), ("0", 0.0), ("2*pi", 2 * math.pi),
])
def test_parse_angle(token, value):
    assert parse_angle(token) == value


def test_coeffs_table(capsys):
    code, out, _ = _run(["coeffs", "--family", "a", "--alpha", "0.7853981633974483", "--n-max", "5"], capsys)
    assert code == 0
    report = json.loads(out)
    assert [r["n"] for r in report["rows"]] == [1, 2, 3, 4, 5]
    for row in report["rows"]:
        assert row["closed_form"] == closed_form_coeff("a", row["n"], math.pi / 4)
        assert abs(row["closed_form"] - row["quadrature"]) < 1e-10
    assert report["diagnostics"]["quadrature_max_err"] < 1e-10
    assert set(report) == {"command", "params", "version", "rows", "diagnostics"}


def test_insert_nodal(capsys):
    code, out, _ = _run(["insert", "--state", "sin", "--barrier", "0", "--n-trunc", "10"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    big = [r["n"] for r in rows if abs(r["coeff"]) > 1e-12]
    assert big == [2]


def test_insert_double_csv(capsys):
    code, out, _ = _run(["insert", "--barrier", "0", "--barrier", "pi/4", "--n-trunc", "3", "--format", "csv"],
                        capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "chamber,n,coeff"
    assert len(lines) == 7
    assert float(lines[1].split(",")[2]) == pytest.approx(closed_form_coeff("a", 1, math.pi / 4), abs=1e-15)


def test_check_loclin(capsys):
    code, out, _ = _run(["check-loclin", "--alpha-grid", "50", "--n-max", "10", "--m-max", "10"], capsys)
    assert code == 0
    diag = json.loads(out)["diagnostics"]
    assert diag["verdict"] == "incompatible"
    code, out, _ = _run(["check-loclin", "--alpha", "pi/4", "--n-max", "1", "--m-max", "1"], capsys)
    diag = json.loads(out)["diagnostics"]
    assert diag["min_abs_residual_eq9"] == pytest.approx(1 - math.sqrt(2) / 2, abs=1e-15)


def test_energy_and_scan(capsys):
    code, out, _ = _run(["energy", "--n-max", "3", "--m-max", "2"], capsys)
    assert code == 0 and len(json.loads(out)["rows"]) == 6
    code, out, _ = _run(["scan-divergence", "--state", "cos", "--barrier", "0", "--n-list", "101,201"], capsys)
    rows = json.loads(out)["rows"]
    assert rows[1]["partial_energy"] > rows[0]["partial_energy"]


def test_evolve_report(capsys):
    code, out, _ = _run(["evolve", "--state", "cos", "--barrier", "0", "--n-trunc", "100",
                         "--t-end", "2", "--steps", "4", "--theta", "pi/2,pi"], capsys)
    assert code == 0
    report = json.loads(out)
    assert len(report["rows"]) == 5
    assert report["diagnostics"]["norm_drift"] < 1e-12


@pytest.mark.parametrize("argv", [
    ["coeffs"],
    ["coeffs", "--family", "z"],
    ["coeffs", "--family", "a", "--alpha", "2.0"],
    ["insert", "--barrier", "0", "--barrier", "3.0"],
    ["scan-divergence", "--state", "sin", "--barrier", "0"],
    ["energy", "--n-max", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_1(argv, capsys):
    code, out, err = _run(argv, capsys)
    assert code == 1
    assert out == ""
    assert err


def test_numerical_failure_exit_2(monkeypatch, capsys):
    from ringwell import cli
    from ringwell.overlap import ConvergenceFailure

    def boom(*args, **kwargs):
        raise ConvergenceFailure("no luck", integral_id="overlap(n=3)")

    monkeypatch.setattr(cli, "family_oracle", boom)
    code, _, err = _run(["coeffs", "--family", "a", "--n-max", "3"], capsys)
    assert code == 2
    assert "overlap(n=3)" in err


def test_round_trip_and_determinism():
    spec = parse_args(["energy", "--n-max", "4", "--m-max", "4", "--threads", "1"])
    code1, text1 = run(spec)
    code2, text2 = run(parse_args(["energy", "--n-max", "4", "--m-max", "4", "--threads", "3"]))
    assert code1 == code2 == 0
    assert text1 == text2
    report = Report.from_json(text1)
    assert report.to_json() == text1
    assert report.rows == json.loads(text1)["rows"]


def test_timestamp_is_isolated():
    plain = run(parse_args(["energy", "--n-max", "2", "--m-max", "2"]))[1]
    stamped = json.loads(run(parse_args(["energy", "--n-max", "2", "--m-max", "2", "--timestamp"]))[1])
    assert "timestamp" in stamped
    stamped.pop("timestamp")
    assert stamped == json.loads(plain)


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("RINGWELL_THREADS", "3")
    assert parse_args(["energy"]).threads == 3
    assert parse_args(["energy", "--threads", "2"]).threads == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    assert main(["insert", "--barrier", "0", "--n-trunc", "4", "--output", str(target)]) == 0
    assert json.loads(target.read_text())["command"] == "insert"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ringwell", "coeffs", "--family", "f", "--n-max", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    rows = json.loads(proc.stdout)["rows"]
    assert rows[1]["closed_form"] == 1.0
