import csv
import io
import json
from pathlib import Path

import pytest

from smallcell_market.cli import REGIONS_HEADER, SWEEP_HEADER, fmt_num, run

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_duopoly_base(capsys):
    code, out, _ = _run(capsys, "duopoly", "--scenario", str(SCENARIOS / "regions_grid.json"))
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["region"] == "A"
    assert float(row["b1s"]) == pytest.approx(1.3333333333, abs=1e-9)
    assert float(row["b2s"]) == pytest.approx(0.6666666667, abs=1e-9)


def test_duopoly_human_and_floor_override(capsys):
    code, out, _ = _run(capsys, "duopoly", "--scenario", str(SCENARIOS / "regions_grid.json"),
                        "--floors", "1.9,0.95", "--format", "human")
    assert code == 0
    fields = dict(line.split(None, 1) for line in out.splitlines())
    assert fields["region"] == "B_I"
    assert "kkt_residual_1" in fields


def test_monopoly(capsys):
    code, out, _ = _run(capsys, "monopoly", "--scenario", str(SCENARIOS / "monopoly.json"))
    assert code == 0
    fields = dict(line.split(None, 1) for line in out.splitlines())
    assert fields["small"] == "2.5" and fields["clipped"] == "true"


def test_flags_only(capsys):
    code, out, _ = _run(capsys, "monopoly", "--alpha", "0.5", "--n-mobile", "50",
                        "--n-fixed", "50", "--r0", "50", "--lambda-s", "2",
                        "--totals", "3,0", "--format", "csv")
    # monopoly wants exactly one SP
    assert code == 1


def test_sweep_regulator(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = _run(capsys, "sweep", "--scenario", str(SCENARIOS / "regulator_small.json"),
                        "--out", str(out_path))
    assert code == 0 and out == ""
    text = out_path.read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == ",".join(SWEEP_HEADER)
    assert len(rows) == 201
    equal = [float(r["b1_new"]) for r in rows if float(r["sw_w_ne"]) == float(r["sw_wo_star"])]
    assert min(equal) == pytest.approx(1.2) and max(equal) <= 4.0


def test_sweep_b_new_override(capsys):
    code, out, _ = _run(capsys, "sweep", "--scenario", str(SCENARIOS / "regulator_small.json"),
                        "--b-new", "10", "--grid", "11")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 11 and float(rows[-1]["b1_new"]) == 10


def test_regions(capsys):
    code, out, _ = _run(capsys, "regions", "--scenario", str(SCENARIOS / "regions_grid.json"),
                        "--grid", "12")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(REGIONS_HEADER)
    assert len(lines) == 1 + 144


def test_verify(capsys):
    code, out, _ = _run(capsys, "verify", "--scenario", str(SCENARIOS / "regions_grid.json"),
                        "--floors", "1.0,0.8", "--grid", "2000")
    assert code == 0
    assert next(csv.DictReader(io.StringIO(out)))["ok"] == "true"


def test_output_is_deterministic(capsys):
    args = ("sweep", "--scenario", str(SCENARIOS / "regulator_large.json"), "--grid", "21")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second
    assert "\r" not in first


@pytest.mark.parametrize("doc, field", [
    ({"params": {"alpha": 0.5, "n_mobile": 50, "n_fixed": 50, "r0": 50, "lambda_s": 2,
                 "beta": 1}}, "params.beta"),
    ({"params": {"alpha": 0.5, "n_mobile": 50, "n_fixed": 50, "r0": 50}}, "params.lambda_s"),
    ({"params": {"alpha": 1.5, "n_mobile": 50, "n_fixed": 50, "r0": 50, "lambda_s": 2},
      "sps": [{"total": 2}, {"total": 1}]}, "params.alpha"),
    ({"params": {"alpha": 0.5, "n_mobile": 50, "n_fixed": 50, "r0": 50, "lambda_s": 2},
      "sps": [{"total": 2}, {"totl": 1}]}, "sps[1].totl"),
    ({"params": {"alpha": 0.5, "n_mobile": 50, "n_fixed": 50, "r0": 50, "lambda_s": 2},
      "sps": [{"total": 2, "floor": 3}, {"total": 1}]}, "sps[0].floor"),
    ({"params": {"alpha": "x", "n_mobile": 50, "n_fixed": 50, "r0": 50, "lambda_s": 2}},
     "params.alpha"),
    ({"extra": 1}, "extra"),
])
def test_malformed_scenario(capsys, tmp_path, doc, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, err = _run(capsys, "duopoly", "--scenario", str(path))
    assert code == 1
    assert field in err


def test_unreadable_scenario(capsys, tmp_path):
    code, _, err = _run(capsys, "duopoly", "--scenario", str(tmp_path / "missing.json"))
    assert code == 1 and "--scenario" in err
    (tmp_path / "broken.json").write_text("{")
    code, _, err = _run(capsys, "duopoly", "--scenario", str(tmp_path / "broken.json"))
    assert code == 1


def test_solver_diagnostic_exit_code(capsys, monkeypatch):
    from smallcell_market import cli
    from smallcell_market.duopoly import SolverDiagnostic

    def boom(*a, **k):
        raise SolverDiagnostic("stuck", (0.1, -0.2))

    monkeypatch.setattr(cli, "solve_ne", boom)
    code, _, err = _run(capsys, "duopoly", "--scenario", str(SCENARIOS / "regions_grid.json"))
    assert code == 2 and "residuals" in err


@pytest.mark.parametrize("x, s", [(1 / 3, "0.333333333333"), (100.0, "100"), (-0.0, "0"),
                                  (float("inf"), "inf"), (2, "2"), (True, "true")])
def test_fmt_num(x, s):
    assert fmt_num(x) == s
