import csv
import io
import json
import math

import pytest

from padic_schneider import cli
from padic_schneider.montecarlo import ExperimentReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand_rational(capsys):
    code, out, _ = run(capsys, "expand", "--prime", "2", "--rational", "2/3", "--depth", "10")
    assert code == 0
    assert json.loads(out) == {"pairs": [[1, 1], [1, 1]], "status": "HitZero"}


def test_expand_padic_digits(capsys):
    code, out, _ = run(capsys, "expand", "-p", "3", "--padic-digits", "0,1,2,2,0,1,1,2,0,2", "--depth", "3")
    data = json.loads(out)
    assert code == 0 and data["status"] == "Complete" and len(data["pairs"]) == 3
    assert data["remaining_precision"] == 10 - sum(a for a, _ in data["pairs"])


def test_expand_csv(capsys):
    code, out, _ = run(capsys, "expand", "-p", "2", "--rational", "2/5", "--format", "csv")
    assert code == 0
    assert list(csv.DictReader(io.StringIO(out))) == [
        {"index": "1", "a": "1", "b": "1"},
        {"index": "2", "a": "2", "b": "1"},
    ]


def test_convergents(capsys):
    code, out, _ = run(capsys, "convergents", "-p", "2", "--rational", "-2", "--depth", "3")
    rows = json.loads(out)["convergents"]
    assert code == 0 and [(r["A"], r["B"]) for r in rows] == [(2, 1), (2, 3), (6, 5)]


def test_fixed_point(capsys):
    code, out, _ = run(capsys, "fixed-point", "-p", "3", "--a", "1", "--b", "1", "--precision", "2")
    assert code == 0 and json.loads(out)["value"] == 3


def test_spectrum_grid_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--prime", "2", "--alpha-min", "0.70", "--alpha-max", "3.0",
                       "--steps", "100", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,alpha,alpha_hat,t_alpha,pressure,dimension"
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 101
    peak = [r for r in rows if abs(float(r["alpha"]) - 2 * math.log(2)) < 1e-14]
    assert len(peak) == 1 and float(peak[0]["dimension"]) == 1.0
    # 15 significant digits, plain decimal point
    assert all("," not in v for r in rows for v in r.values())
    assert max(len(r["alpha"].replace(".", "").lstrip("0")) for r in rows) <= 15


def test_spectrum_single_points(capsys):
    code, out, _ = run(capsys, "spectrum", "-p", "3", "-n", "2", "--alpha-hat", "1.5")
    d = json.loads(out)
    assert code == 0 and d["alpha_hat"] == pytest.approx(1.5)
    assert d["dimension"] == pytest.approx((2 / 3) * (math.log(2) + math.log(2)) / math.log(3), abs=1e-12)
    code, out, _ = run(capsys, "spectrum", "-p", "3", "--alpha", str(math.log(3)))
    d = json.loads(out)
    assert d["t_alpha"] == "inf" and d["pressure"] == "-inf"


def test_dimension(capsys):
    code, out, _ = run(capsys, "dimension", "--prime", "2", "--digits", "1,2")
    assert code == 0 and json.loads(out)["dimension"] == pytest.approx(0.6942419136306174, abs=1e-12)
    code, out, _ = run(capsys, "dimension", "-p", "5", "--t", "1")
    assert json.loads(out)["dimension"] == pytest.approx(1, abs=1e-14)


def test_pressure(capsys):
    code, out, _ = run(capsys, "pressure", "-p", "3", "--t", "2")
    assert code == 0 and json.loads(out)["pressure"] == pytest.approx(-math.log(4))
    code, out, _ = run(capsys, "pressure", "-p", "3", "--t", "-0.5")
    assert json.loads(out)["pressure"] == "inf"


@pytest.mark.parametrize("mode,extra", [("haar", []), ("gibbs", ["--t", "1.5"]), ("approx", [])])
def test_mc_commands_round_trip(capsys, tmp_path, mode, extra):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, f"mc-{mode}", "-p", "3", "--samples", "20", "--depth", "30", "--seed", "4",
                       "--output", str(path), *extra)
    assert code == 0 and out == ""
    report = ExperimentReport.from_dict(json.loads(path.read_text()))
    assert report.config.mode == mode and report.config.samples == 20
    assert json.loads(json.dumps(report.to_dict())) == json.loads(path.read_text())


def test_mc_csv(capsys):
    code, out, _ = run(capsys, "mc-gibbs", "-p", "2", "--t", "0", "-n", "3", "--samples", "10", "--depth", "10",
                       "--format", "csv")
    header, row = out.splitlines()
    assert header == "p,mode,t,n,samples,depth,seed,lambda_mean,lambda_stderr,alpha_theory,dim_empirical,dim_theory"
    assert row.startswith("2,gibbs,0,3,10,10,0,")


@pytest.mark.parametrize(
    "argv",
    [
        ["expand", "-p", "4", "--rational", "2/3"],
        ["expand", "-p", "2"],
        ["expand", "-p", "2", "--rational", "x/y"],
        ["spectrum", "-p", "2"],
        ["nonsense"],
        ["mc-haar", "--samples", "0"],
        ["mc-haar", "--t", "1"],
        ["verify", "--only", "nothing"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "usage" in err


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["spectrum", "-p", "2", "--alpha", "0.5"], "OutOfDomain"),
        (["spectrum", "-p", "2", "-n", "3", "--alpha", "5"], "OutOfDomain"),
        (["expand", "-p", "3", "--rational", "1/3"], "NotInMaximalIdeal"),
        (["expand", "-p", "3", "--rational", "0"], "ZeroInput"),
        (["mc-gibbs", "-p", "2", "--t", "-1"], "DivergentWeights"),
        (["expand", "-p", "2", "--padic-digits", "0,0,0"], "PrecisionExhausted"),
    ],
)
def test_domain_errors_exit_2(capsys, argv, kind):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["error"] == kind


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "1,5,13")
    assert code == 0
    assert out.count("[PASS]") == 3 and "3/3 criteria passed" in out
