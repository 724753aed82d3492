"""Seeded Monte Carlo experiments for the Schneider digit statistics.

Three experiments are available:

``haar``
    Haar-random points of pZ_p are drawn digit by digit and expanded with the
    p-adic Schneider map; the Birkhoff mean of ``log psi`` is compared with
    ``p log p / (p - 1)`` and the digit law with ``(p - 1) p^(-a)``.
``gibbs``
    Digit pairs are drawn i.i.d. from the Bernoulli equilibrium state of
    ``-t log psi`` (optionally truncated to ``a <= n``); the Lyapunov mean and
    the cylinder-mass pointwise dimension are compared with the spectrum.
``approx``
    Haar digit words are realized as exact rationals and the identity
    ``v_p(x - A_n/B_n) = a_1 + ... + a_{n+1}`` is checked for every ``n``.

Sample ``i`` always draws from its own generator, spawned from
``(seed, i)``, so results do not depend on how samples are scheduled.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import thermo
from .padic_core import Prime, haar_sample, rational_valuation
from .schneider import Status, convergent_pairs, expand, padic_digit_stream

MODES = ("haar", "gibbs", "approx")

#: precision budget as a multiple of the expected digit consumption
BUDGET_FACTOR = 4


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass(frozen=True)
class ExperimentConfig:
    p: int
    mode: str
    samples: int
    depth: int
    seed: int = 0
    t: Optional[float] = None
    truncation: Optional[int] = None
    precision: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p", int(Prime(self.p)))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.samples < 1 or self.depth < 1:
            raise ValueError("samples and depth must be positive")
        if self.mode == "gibbs" and self.t is None:
            raise ValueError("gibbs mode needs t")
        if self.mode != "gibbs" and (self.t is not None or self.truncation is not None):
            raise ValueError(f"t and truncation only apply to gibbs mode, not {self.mode}")
        need = self.required_precision()
        if self.precision is None:
            object.__setattr__(self, "precision", need)
        elif self.precision < need:
            raise ValueError(f"precision budget {self.precision} < required {need}")

    def mean_digit(self) -> float:
        if self.mode == "gibbs":
            return thermo.gibbs_weights(self.p, self.t, self.truncation).mean_digit
        return self.p / (self.p - 1)

    def required_precision(self) -> int:
        return math.ceil(BUDGET_FACTOR * self.depth * self.mean_digit()) + 2


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    lambda_mean: float
    lambda_stderr: float
    alpha_theory: float
    dim_empirical: float
    dim_theory: float
    frequencies: dict[int, float]
    elapsed: float
    violations: Optional[int] = None
    exhausted: int = 0
    digits: int = 0

    @property
    def z_score(self) -> float:
        if self.lambda_stderr == 0:
            return 0.0 if self.lambda_mean == self.alpha_theory else math.inf
        return (self.lambda_mean - self.alpha_theory) / self.lambda_stderr

    def to_dict(self) -> dict:
        d = asdict(self)
        d["frequencies"] = {str(a): f for a, f in self.frequencies.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        d = dict(d)
        d["config"] = ExperimentConfig(**d["config"])
        d["frequencies"] = {int(a): float(f) for a, f in d["frequencies"].items()}
        return cls(**d)

    CSV_FIELDS = (
        "p", "mode", "t", "n", "samples", "depth", "seed",
        "lambda_mean", "lambda_stderr", "alpha_theory", "dim_empirical", "dim_theory",
    )

    def csv_row(self) -> dict:
        c = self.config
        return {
            "p": c.p, "mode": c.mode, "t": c.t, "n": c.truncation,
            "samples": c.samples, "depth": c.depth, "seed": c.seed,
            "lambda_mean": self.lambda_mean, "lambda_stderr": self.lambda_stderr,
            "alpha_theory": self.alpha_theory, "dim_empirical": self.dim_empirical,
            "dim_theory": self.dim_theory,
        }


# -- per-sample kernels (module level so they can be pickled) ---------------


def _haar_chunk(config: ExperimentConfig, indices):
    p = config.p
    out = []
    for i in indices:
        x = haar_sample(p, config.precision, sample_rng(config.seed, i))
        if x.value == 0:
            out.append((np.zeros(0, dtype=np.int64), True))
            continue
        a, _, state = padic_digit_stream(x, config.depth)
        out.append((np.asarray(a, dtype=np.int64), state is None))
    return out


def _gibbs_chunk(config: ExperimentConfig, indices):
    spec = thermo.gibbs_weights(config.p, config.t, config.truncation)
    out = []
    for i in indices:
        a, _ = spec.sample_digits(sample_rng(config.seed, i), config.depth)
        out.append((a, False))
    return out


def _approx_chunk(config: ExperimentConfig, indices):
    p = config.p
    out = []
    for i in indices:
        x = haar_sample(p, config.precision, sample_rng(config.seed, i))
        if x.value == 0:
            out.append((np.zeros(0, dtype=np.int64), True, 0, None))
            continue
        e = expand(x, config.depth, remainder=False)
        a = np.asarray(e.a_digits, dtype=np.int64)
        bad, v_last = _check_approximation(e.pairs, p)
        out.append((a, e.status is Status.PRECISION_EXHAUSTED, bad, v_last))
    return out


def _check_approximation(pairs, p):
    # Realize the word as the exact rational x = A_D/B_D, re-expand it and
    # compare every v_p(x - A_n/B_n) with the partial digit sums.
    D = len(pairs)
    if D == 0:
        return 0, None
    AB = convergent_pairs(pairs, p)
    x = Fraction(*AB[D])
    bad = 0
    e = expand(x, D + 1, p)
    if e.status is not Status.HIT_ZERO or tuple(e.pairs) != tuple(pairs):
        bad += 1
    partial = np.cumsum([d.a for d in pairs])
    v = None
    for n in range(D):
        v = rational_valuation(x - Fraction(*AB[n]), p)
        if v != partial[n]:
            bad += 1
    return bad, v


_KERNELS = {"haar": _haar_chunk, "gibbs": _gibbs_chunk, "approx": _approx_chunk}


def _run_samples(config: ExperimentConfig):
    kernel = _KERNELS[config.mode]
    if config.workers <= 1:
        return kernel(config, range(config.samples))
    chunks = np.array_split(np.arange(config.samples), config.workers * 4)
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        parts = pool.map(kernel, [config] * len(chunks), [c.tolist() for c in chunks])
        return [r for part in parts for r in part]


def _frequencies(digit_arrays) -> tuple[dict[int, float], int]:
    counts = np.zeros(1, dtype=np.int64)
    for a in digit_arrays:
        if a.size:
            c = np.bincount(a)
            if c.size > counts.size:
                c[: counts.size] += counts
                counts = c
            else:
                counts[: c.size] += c
    total = int(counts.sum())
    if total == 0:
        return {}, 0
    return {a: float(counts[a] / total) for a in range(1, counts.size) if counts[a]}, total


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def _snap(alpha: float, lo: float, hi: float) -> float:
    # keep closed-form Lyapunov levels inside the spectrum domain despite rounding
    if abs(alpha - lo) <= 1e-12 * lo:
        return lo
    if abs(alpha - hi) <= 1e-12 * hi:
        return hi
    return alpha


def _summarize(config, digit_arrays, spec, alpha_theory, dim_theory, start, exhausted, violations=None):
    L = math.log(config.p)
    used = [a for a in digit_arrays if a.size]
    lam = np.array([L * a.mean() for a in used])
    dims = np.array([-spec.log_weight(a).sum() / (L * a.sum()) for a in used])
    lambda_mean, lambda_stderr = _mean_stderr(lam)
    freqs, total = _frequencies(used)
    return ExperimentReport(
        config=config,
        lambda_mean=lambda_mean,
        lambda_stderr=lambda_stderr,
        alpha_theory=alpha_theory,
        dim_empirical=float(np.mean(dims)),
        dim_theory=dim_theory,
        frequencies=freqs,
        elapsed=time.perf_counter() - start,
        violations=violations,
        exhausted=exhausted,
        digits=total,
    )


def run_haar(config: ExperimentConfig) -> ExperimentReport:
    if config.mode != "haar":
        raise ValueError("run_haar needs a haar config")
    start = time.perf_counter()
    results = _run_samples(config)
    p, L = config.p, math.log(config.p)
    haar = thermo.gibbs_weights(p, 1.0)
    alpha = p * L / (p - 1)
    return _summarize(
        config,
        [a for a, _ in results],
        haar,
        alpha,
        thermo.spectrum_full(p, alpha).dimension,
        start,
        sum(ex for _, ex in results),
    )


def run_gibbs(config: ExperimentConfig) -> ExperimentReport:
    if config.mode != "gibbs":
        raise ValueError("run_gibbs needs a gibbs config")
    start = time.perf_counter()
    spec = thermo.gibbs_weights(config.p, config.t, config.truncation)
    results = _run_samples(config)
    L = math.log(config.p)
    n = config.truncation
    alpha = spec.lyapunov
    if n is not None:
        alpha = _snap(alpha, L, n * L)
    dim_theory = thermo.spectrum(config.p, alpha, n).dimension
    return _summarize(config, [a for a, _ in results], spec, alpha, dim_theory, start, 0)


def run_approx(config: ExperimentConfig) -> ExperimentReport:
    """Exact check of the approximation identity on Haar digit words.

    ``lambda_mean`` is the mean approximation exponent
    ``(log p / n) v_p(x - A_n/B_n)`` at ``n = depth - 1``.
    """
    if config.mode != "approx":
        raise ValueError("run_approx needs an approx config")
    start = time.perf_counter()
    results = _run_samples(config)
    p, L = config.p, math.log(config.p)
    n = config.depth - 1
    haar = thermo.gibbs_weights(p, 1.0)
    alpha = p * L / (p - 1)
    report = _summarize(
        config,
        [r[0] for r in results],
        haar,
        alpha,
        thermo.spectrum_full(p, alpha).dimension,
        start,
        sum(r[1] for r in results),
        violations=sum(r[2] for r in results),
    )
    if n >= 1:
        expo = np.array([L * r[3] / n for r in results if r[3] is not None and len(r[0]) == config.depth])
        if expo.size:
            report.lambda_mean, report.lambda_stderr = _mean_stderr(expo)
    report.elapsed = time.perf_counter() - start
    return report


def run(config: ExperimentConfig) -> ExperimentReport:
    return {"haar": run_haar, "gibbs": run_gibbs, "approx": run_approx}[config.mode](config)
