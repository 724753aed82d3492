import json
import math

import pytest

from padic_schneider import montecarlo as M
from padic_schneider import thermo
from padic_schneider.errors import DivergentWeights


def same_report(r1, r2):
    d1, d2 = r1.to_dict(), r2.to_dict()
    d1.pop("elapsed"), d2.pop("elapsed")
    return d1 == d2


def test_config_validation():
    c = M.ExperimentConfig(3, "haar", 10, 100)
    assert c.precision >= 4 * 100 * 1.5
    with pytest.raises(ValueError):
        M.ExperimentConfig(4, "haar", 10, 10)
    with pytest.raises(ValueError):
        M.ExperimentConfig(2, "haar", 0, 10)
    with pytest.raises(ValueError):
        M.ExperimentConfig(2, "gibbs", 10, 10)
    with pytest.raises(ValueError):
        M.ExperimentConfig(2, "haar", 10, 10, t=1.0)
    with pytest.raises(ValueError):
        M.ExperimentConfig(2, "haar", 10, 100, precision=50)
    with pytest.raises(DivergentWeights):
        M.ExperimentConfig(2, "gibbs", 10, 10, t=-1.0)


@pytest.mark.parametrize("p", [2, 3])
def test_haar_run(p):
    r = M.run_haar(M.ExperimentConfig(p, "haar", 400, 500, seed=5))
    assert abs(r.z_score) < 4
    assert r.alpha_theory == pytest.approx(p * math.log(p) / (p - 1))
    assert abs(sum(r.frequencies.values()) - 1) < 1e-9
    assert r.frequencies[1] == pytest.approx((p - 1) / p, abs=0.01)
    assert r.dim_empirical == pytest.approx(1, abs=1e-12)
    assert r.exhausted == 0 and r.digits == 400 * 500
    assert r.lambda_stderr >= 0


def test_reports_are_deterministic_and_schedule_free():
    c = M.ExperimentConfig(3, "haar", 40, 200, seed=77)
    a, b = M.run(c), M.run(c)
    assert same_report(a, b)
    par = M.run(M.ExperimentConfig(3, "haar", 40, 200, seed=77, workers=2))
    for key in ("lambda_mean", "lambda_stderr", "frequencies", "dim_empirical"):
        assert getattr(par, key) == getattr(a, key)
    other = M.run(M.ExperimentConfig(3, "haar", 40, 200, seed=78))
    assert other.lambda_mean != a.lambda_mean


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_gibbs_run(t):
    r = M.run_gibbs(M.ExperimentConfig(2, "gibbs", 2000, 500, seed=3, t=t))
    assert r.alpha_theory == pytest.approx(-thermo.dpressure_full(2, t))
    assert abs(r.z_score) < 4
    assert abs(r.dim_empirical - r.dim_theory) < 0.01
    assert r.dim_theory == pytest.approx(thermo.spectrum_full(2, r.alpha_theory).dimension)


def test_gibbs_examples():
    r = M.run_gibbs(M.ExperimentConfig(2, "gibbs", 1000, 500, seed=1, t=1.0))
    assert r.dim_empirical == pytest.approx(1, abs=0.01)
    r = M.run_gibbs(M.ExperimentConfig(2, "gibbs", 200, 200, seed=1, t=2.0))
    assert r.alpha_theory == pytest.approx(math.log(2) * 4 / 3)
    for p in (2, 3):
        r = M.run_gibbs(M.ExperimentConfig(p, "gibbs", 500, 200, seed=2, t=0.0, truncation=2))
        assert r.alpha_theory == pytest.approx(1.5 * math.log(p), rel=1e-14)
        assert set(r.frequencies) == {1, 2}
        assert abs(r.z_score) < 4


def test_gibbs_at_truncation_edge():
    # n = 1 pins every digit to 1; the theoretical level is the domain endpoint
    r = M.run_gibbs(M.ExperimentConfig(3, "gibbs", 20, 50, seed=0, t=0.7, truncation=1))
    assert r.lambda_mean == pytest.approx(math.log(3)) and r.alpha_theory == math.log(3)
    assert r.dim_theory == pytest.approx(math.log(2) / math.log(3))


def test_approx_run():
    r = M.run_approx(M.ExperimentConfig(2, "approx", 200, 50, seed=9))
    assert r.violations == 0 and r.exhausted == 0
    assert abs(r.lambda_mean - r.alpha_theory) < 0.15
    r3 = M.run_approx(M.ExperimentConfig(5, "approx", 30, 40, seed=9))
    assert r3.violations == 0


def test_approximation_check_catches_bad_words():
    from padic_schneider.schneider import DigitPair

    assert M._check_approximation([DigitPair(1, 1), DigitPair(1, 1)], 2)[0] == 0
    assert M._check_approximation([DigitPair(1, 2), DigitPair(2, 1)], 3)[0] == 0
    # b = 4 is not a residue digit for p = 3; re-expansion gives (1, 1) instead
    bad, _ = M._check_approximation([DigitPair(1, 4)], 3)
    assert bad >= 1


def test_report_round_trip():
    r = M.run(M.ExperimentConfig(3, "gibbs", 50, 60, seed=4, t=1.5, truncation=5))
    text = json.dumps(r.to_dict())
    back = M.ExperimentReport.from_dict(json.loads(text))
    assert back == r
    assert set(r.csv_row()) == set(M.ExperimentReport.CSV_FIELDS)
