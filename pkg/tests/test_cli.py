import json

import pytest

from main import main


def _lines(capsys):
    return capsys.readouterr().out.strip().splitlines()


def test_classify(capsys):
    assert main(["classify", "--map", "z^2+0.7*z"]) == 0
    lines = _lines(capsys)
    assert len(lines) == 3
    assert "fixed_class=attracting" in lines[0]
    assert "fixed_class=repelling" in lines[1]
    assert "fixed_class=superattracting" in lines[2]
    assert "location=inf" in lines[2]


def test_classify_period_two_json(capsys):
    assert main(["--format", "json", "classify", "--map", "z^2-1", "--period", "2"]) == 0
    records = [json.loads(line) for line in _lines(capsys)]
    assert any(r["period"] == 2 and r["fixed_class"] == "superattracting" for r in records)


def test_arith_golden_json(capsys):
    assert main(["arith", "--xi", "golden", "--format", "json"]) == 0
    (line,) = _lines(capsys)
    report = json.loads(line)
    assert report["depth"] == 30
    brjuno = next(r for r in report["records"] if r["name"] == "Br")
    assert brjuno["verdict"] == "holds-at-depth"


def test_arith_expansion(capsys):
    assert main(["arith", "--xi", "3/7", "--expansion", "--depth", "5"]) == 0
    lines = _lines(capsys)
    assert "quotients=[2,3]" in lines[0]
    assert "terminated=true" in lines[0]


def test_cycles_from_truncated_angle(capsys):
    assert main(["--format", "json", "cycles", "--xi", "gaps:1,20,400", "--q-max", "2"]) == 0
    (line,) = _lines(capsys)
    report = json.loads(line)
    assert report["truncation_bits"] == 53
    assert any(c["period"] == 2 for c in report["levels"][1]["cycles"])


def test_report_written_to_out(tmp_path, capsys):
    path = tmp_path / "fixed.txt"
    assert main(["classify", "--map", "z/(1+z)", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert "rationally_indifferent" in path.read_text()


def test_preset_writes_pgm(tmp_path):
    path = tmp_path / "fig5.pgm"
    assert main(["preset", "fig5", "--pixels", "32", "--out", str(path), "--max-iter", "200"]) == 0
    assert path.read_bytes().startswith(b"P5\n32 32\n255\n")


def test_global_flags_before_command(tmp_path):
    path = tmp_path / "julia.pgm"
    code = main(["--out", str(path), "--threads", "2", "render", "--map", "z^2-1",
                 "--pixels", "16", "--center=-0.5,0.25", "--max-iter", "50"])
    assert code == 0
    assert path.read_bytes().startswith(b"P5\n16 16\n255\n")


@pytest.mark.parametrize("argv", [
    ["classify", "--map", "z^2+"],
    ["frobnicate"],
    ["classify"],
    ["arith", "--xi", "gaps:3,3"],
    ["render", "--map", "z^2", "--pixels", "4", "--out", "unused.pgm"],
    ["preset", "fig99"],
])
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_numerical_failure_exits_two(capsys):
    assert main(["cycles", "--map", "z^2+0.5*z"]) == 2
    assert "error:" in capsys.readouterr().err
