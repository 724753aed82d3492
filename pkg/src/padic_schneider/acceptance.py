"""Acceptance suite: numbered end-to-end checks with pinned seeds.

Each check returns a :class:`CriterionResult`; :func:`run_criteria` runs a
selection of them (by group name or number) and is what ``verify`` calls.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from . import montecarlo, schneider, thermo
from .padic_core import int_valuation, rational_valuation
from .schneider import DigitPair, Status

SEED = 20240917


@dataclass(frozen=True)
class CriterionResult:
    number: int
    group: str
    title: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.group:<10} {self.title}: {self.detail} ({self.elapsed:.2f}s)"


_REGISTRY: list[tuple[int, str, str, Callable[[], tuple[bool, str]]]] = []


def _criterion(number: int, group: str, title: str):
    def register(fn):
        _REGISTRY.append((number, group, title, fn))
        return fn

    return register


def _worst(pairs) -> float:
    return max((abs(a - b) for a, b in pairs), default=0.0)


# -- thermo ------------------------------------------------------------------


@_criterion(1, "thermo", "spectrum identity grid")
def _c1():
    grid = np.linspace(1.001, 12, 200)
    err = _worst(
        (thermo.spectrum_full(p, ah * math.log(p)).dimension, thermo.spectrum_digit_mean(p, ah))
        for p in (2, 3, 5, 7)
        for ah in grid
    )
    return err < 1e-12, f"max err {err:.2e}"


@_criterion(2, "thermo", "maximum at p log p/(p-1)")
def _c2():
    val_err = loc_err = 0.0
    for p in (2, 3, 5, 7, 11):
        a_star = p * math.log(p) / (p - 1)
        val_err = max(val_err, abs(thermo.spectrum_full(p, a_star).dimension - 1))
        loc_err = max(loc_err, abs(thermo.spectrum_argmax(p) - a_star))
    return val_err < 1e-12 and loc_err < 1e-6, f"value err {val_err:.2e}, argmax err {loc_err:.2e}"


@_criterion(3, "thermo", "Legendre duality")
def _c3():
    worst = 0.0
    for p in (2, 3, 5):
        L = math.log(p)
        pf = lambda t, p=p: thermo.pressure_full(p, t)
        for a in np.linspace(L * 1.01, 12 * L, 100):
            worst = max(worst, abs(thermo.legendre_numeric(pf, a, (0.0, math.inf)) - thermo.spectrum_full(p, a).dimension))
        for n in (2, 3, 5, 10):
            pn = lambda t, p=p, n=n: thermo.pressure_truncated(p, n, t)
            for a in np.linspace(L, n * L, 102)[1:-1]:
                worst = max(worst, abs(thermo.legendre_numeric(pn, a) - thermo.spectrum_truncated(p, n, a).dimension))
    return worst < 1e-9, f"max err {worst:.2e}"


@_criterion(4, "thermo", "two-digit spectrum")
def _c4():
    grid_err = mid_err = 0.0
    ends_ok = True
    for p in (2, 3, 5, 7):
        L = math.log(p)
        for a in np.linspace(L, 2 * L, 202)[1:-1]:
            grid_err = max(grid_err, abs(thermo.spectrum_truncated(p, 2, a).dimension - thermo.spectrum_two_digit(p, a)))
        ends_ok &= thermo.spectrum_truncated(p, 2, L).dimension == math.log(p - 1) / L
        ends_ok &= thermo.spectrum_truncated(p, 2, 2 * L).dimension == math.log(p - 1) / (2 * L)
        mid = (2 / 3) * (math.log(p - 1) + math.log(2)) / L
        mid_err = max(mid_err, abs(thermo.spectrum_truncated(p, 2, 1.5 * L).dimension - mid))
    ok = grid_err < 1e-9 and mid_err < 1e-12 and ends_ok
    return ok, f"grid err {grid_err:.2e}, midpoint err {mid_err:.2e}, endpoints {'exact' if ends_ok else 'WRONG'}"


@_criterion(5, "thermo", "midpoint law")
def _c5():
    err = 0.0
    for p in (2, 3, 5):
        L = math.log(p)
        for n in range(2, 11):
            got = thermo.spectrum_truncated(p, n, (n + 1) / 2 * L).dimension
            want = 2 / (n + 1) * (math.log(p - 1) + math.log(n)) / L
            err = max(err, abs(got - want))
    return err < 1e-12, f"max err {err:.2e}"


@_criterion(6, "thermo", "Bowen roots")
def _c6():
    err = 0.0
    for p in (2, 3, 5, 7):
        want = math.log((p - 1 + math.sqrt(p * p + 2 * p - 3)) / 2) / math.log(p)
        err = max(err, abs(thermo.bowen_dimension(p, [1, 2]) - want))
        err = max(err, abs(thermo.bowen_dimension(p, [1]) - math.log(p - 1) / math.log(p)))
    roots = [thermo.bowen_dimension(2, range(1, n + 1)) for n in range(1, 31)]
    increasing = all(x < y for x, y in zip(roots, roots[1:]))
    deficit = 1 - roots[-1]
    ok = err < 1e-10 and increasing and deficit < 1e-8
    return ok, f"closed-form err {err:.2e}, increasing={increasing}, 1-root(2,30)={deficit:.2e}"


@_criterion(7, "thermo", "periodic-point pressure")
def _c7():
    err = 0.0
    for p in (2, 3):
        for n in (1, 2, 3):
            for m in (1, 2, 3, 4):
                for t in (-1.0, 0.5, 1.0, 2.0):
                    e = thermo.periodic_pressure(p, range(1, n + 1), t, m, method="enumerate")
                    f = thermo.periodic_pressure(p, range(1, n + 1), t, m, method="product")
                    g = thermo.pressure_truncated(p, n, t)
                    err = max(err, abs(e - f), abs(e - g))
    return err < 1e-12, f"max err {err:.2e}"


@_criterion(8, "thermo", "truncated pressure convergence")
def _c8():
    err = max(
        abs(thermo.pressure_truncated(p, 40, t) - thermo.pressure_full(p, t))
        for p in (2, 3, 5)
        for t in (0.5, 1.0, 2.0)
    )
    return err < 1e-6, f"max gap at n=40 {err:.2e}"


# -- schneider -------------------------------------------------------------------


def _random_word(rng: random.Random, p: int, length: int):
    return [DigitPair(rng.choice((1, 1, 1, 2, 2, 3, 4, 6)), rng.randint(1, p - 1)) for _ in range(length)]


@_criterion(9, "schneider", "expansion exactness")
def _c9():
    problems = []
    e = schneider.expand(Fraction(2, 3), 10, 2)
    if [tuple(d) for d in e.pairs] != [(1, 1), (1, 1)] or e.status is not Status.HIT_ZERO:
        problems.append("2/3")
    e = schneider.expand(Fraction(2, 5), 10, 2)
    if [tuple(d) for d in e.pairs] != [(1, 1), (2, 1)] or e.status is not Status.HIT_ZERO:
        problems.append("2/5")
    pair, tx = schneider.step_rational(-2, 2)
    e = schneider.expand(-2, 20, 2)
    if tx != -2 or tuple(pair) != (1, 1) or any(tuple(d) != (1, 1) for d in e.pairs) or len(e) != 20:
        problems.append("-2")
    rng = random.Random(SEED)
    bad = 0
    for _ in range(1000):
        p = rng.choice((2, 3, 5, 7))
        word = _random_word(rng, p, rng.randint(1, 50))
        AB = schneider.convergent_pairs(word, p)
        for k in range(1, len(word) + 1):
            if Fraction(*AB[k]) != schneider.evaluate_word(word[:k], p):
                bad += 1
    if bad:
        problems.append(f"{bad} convergent mismatches")
    return not problems, "all exact" if not problems else ", ".join(problems)


def _identity_violations(x: Fraction, p: int, max_n: int = 50) -> tuple[int, int]:
    e = schneider.expand(x, max_n + 1, p)
    AB = schneider.convergent_pairs(e.pairs, p)
    partial = np.cumsum([d.a for d in e.pairs])
    checked = bad = 0
    for n in range(min(max_n, len(e) - 1)):
        checked += 1
        if rational_valuation(x - Fraction(*AB[n]), p) != partial[n]:
            bad += 1
    return checked, bad


@_criterion(10, "schneider", "approximation identity")
def _c10():
    rng = random.Random(SEED + 10)
    checked = bad = 0
    for i in range(200):
        p = (2, 3, 5)[i % 3]
        den = rng.randint(1, 10**12)
        while den % p == 0:
            den = rng.randint(1, 10**12)
        x = Fraction(p * rng.choice((-1, 1)) * rng.randint(1, 10**12), den)
        c, b = _identity_violations(x, p)
        checked += c
        bad += b
    report = montecarlo.run_approx(montecarlo.ExperimentConfig(2, "approx", 200, 50, seed=SEED))
    bad += report.violations
    ok = bad == 0 and checked > 0 and report.exhausted == 0
    return ok, f"{bad} violations ({checked} rational checks, 200 Haar words, {report.exhausted} exhausted)"


@_criterion(11, "schneider", "phi equals p^a3")
def _c11():
    rng = random.Random(SEED + 11)
    tested = bad = 0
    for p in (2, 3, 5):
        done = 0
        while done < 100:
            den = rng.randint(1, 10**6)
            if den % p == 0:
                continue
            x = Fraction(p * rng.choice((-1, 1)) * rng.randint(1, 10**6), den)
            e = schneider.expand(x, 3, p)
            if len(e) < 3:
                continue
            done += 1
            if schneider.phi(x, p) != p ** e.pairs[2].a:
                bad += 1
        tested += done
    return bad == 0, f"{bad} mismatches in {tested} rationals"


@_criterion(12, "schneider", "rational tail")
def _c12():
    rng = random.Random(SEED + 12)
    counts = {"Finite": 0, "TailReached": 0, "NotReached": 0}
    for p in (2, 3):
        done = 0
        while done < 100:
            m = rng.choice([k for k in range(-50, 51) if k])
            n = rng.randint(1, 50)
            x = Fraction(m, n)
            if rational_valuation(x, p) < 1:
                continue
            done += 1
            counts[schneider.rational_tail_check(x, p, 5000).kind] += 1
    return counts["NotReached"] == 0, ", ".join(f"{k}={v}" for k, v in counts.items())


@_criterion(13, "schneider", "fixed points")
def _c13():
    bad = []
    N = 64
    for p in (2, 3, 5):
        m = p**N
        for a in range(1, 5):
            for b in range(1, p):
                x = schneider.fixed_point(a, b, p, N)
                ok = (x.value**2 + b * x.value - p**a) % m == 0
                ok &= int_valuation(x.value, p) == a
                pair, tx = schneider.step_padic(x)
                ok &= tuple(pair) == (a, b) and (tx.value - x.value) % p**tx.precision == 0
                if not ok:
                    bad.append((p, a, b))
    return not bad, "all lifted" if not bad else f"failures {bad}"


# -- montecarlo ----------------------------------------------------------------


@_criterion(14, "montecarlo", "Haar Monte Carlo")
def _c14():
    parts, ok = [], True
    start = time.perf_counter()
    for p in (2, 3):
        r = montecarlo.run_haar(montecarlo.ExperimentConfig(p, "haar", 10**4, 10**3, seed=SEED))
        mean_err = abs(r.lambda_mean / math.log(p) - p / (p - 1))
        worst_z = 0.0
        for a in range(1, 7):
            q = (p - 1) * p ** (-a)
            sigma = math.sqrt(q * (1 - q) / r.digits)
            worst_z = max(worst_z, abs(r.frequencies.get(a, 0.0) - q) / sigma)
        ok &= mean_err < 0.01 and worst_z < 3 and r.exhausted < r.config.samples / 100
        parts.append(f"p={p}: |mean-p/(p-1)|={mean_err:.1e}, max freq z={worst_z:.2f}")
    runtime = time.perf_counter() - start
    ok &= runtime < 60
    return ok, "; ".join(parts) + f"; {runtime:.1f}s"


@_criterion(15, "montecarlo", "Gibbs Monte Carlo")
def _c15():
    parts, ok = [], True
    closed = 0.0
    for t in (0.5, 1.0, 2.0):
        r = montecarlo.run_gibbs(montecarlo.ExperimentConfig(2, "gibbs", 10**4, 10**3, seed=SEED, t=t))
        target = thermo.spectrum_full(2, r.alpha_theory).dimension
        rel = abs(r.lambda_mean - r.alpha_theory) / r.alpha_theory
        derr = abs(r.dim_empirical - target)
        closed = max(closed, abs(thermo.dimension_from_measure(thermo.gibbs_weights(2, t)) - target))
        ok &= rel < 0.01 and derr < 0.01
        parts.append(f"t={t}: rel={rel:.1e}, dim err={derr:.1e}")
    ok &= closed < 1e-10
    return ok, "; ".join(parts) + f"; closed-form err {closed:.1e}"


GROUPS = ("thermo", "schneider", "montecarlo")


def _selected(only: Optional[Iterable[str]]):
    if not only:
        return list(_REGISTRY)
    keys = {str(k).strip() for k in only}
    unknown = keys - set(GROUPS) - {str(n) for n, *_ in _REGISTRY}
    if unknown:
        raise ValueError(f"unknown criteria selection: {', '.join(sorted(unknown))}")
    return [c for c in _REGISTRY if c[1] in keys or str(c[0]) in keys]


def run_criterion(number: int) -> CriterionResult:
    for entry in _REGISTRY:
        if entry[0] == number:
            return _run(entry)
    raise KeyError(number)


def _run(entry) -> CriterionResult:
    number, group, title, fn = entry
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure, not an abort of the suite
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, group, title, bool(passed), detail, time.perf_counter() - start)


def run_criteria(only: Optional[Iterable[str]] = None, echo: Optional[Callable[[str], None]] = None):
    results = []
    for entry in _selected(only):
        r = _run(entry)
        if echo is not None:
            echo(r.line())
        results.append(r)
    return results
