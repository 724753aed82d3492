"""Pressure functions, Lyapunov spectra and dimensions for the Schneider map.

All logarithms are natural; ``log_p x`` is ``log x / log p``.  Lyapunov
levels ``alpha`` are absolute (the Birkhoff mean of ``log psi = a log p``);
``alpha_hat = alpha / log p`` is the mean digit.

The geometric potential is locally constant, so for the Bernoulli structure of
the digit shift everything reduces to sums of ``p^(-t a)`` over the allowed
valuation digits ``a`` (each paired with ``p - 1`` residue digits ``b``):

* full alphabet:        P(t)   = log((p-1) / (p^t - 1))           (t > 0)
* digits ``a <= n``:    P_n(t) = log(p-1) + log((p^tn - 1) / (p^tn (p^t - 1)))
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import optimize

from .errors import AtBoundary, DivergentWeights, NoMinimum, OutOfDomain, TooLarge
from .padic_core import Prime

INF = math.inf

#: limit on the number of words enumerated by :func:`periodic_pressure`
MAX_ENUMERATION = 10**7


@dataclass(frozen=True)
class SpectrumPoint:
    """One point on a Lyapunov spectrum curve.

    ``t_alpha`` is ``+inf`` (``-inf``) at the lower (upper) end of the domain,
    where ``pressure`` is the matching infinite limit and ``dimension`` the
    limiting value.
    """

    p: int
    alpha: float
    t_alpha: float
    pressure: float
    dimension: float
    truncation: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "p", int(self.p))

    @property
    def alpha_hat(self) -> float:
        return self.alpha / math.log(self.p)


def _log_abs_expm1(z: float) -> float:
    # log|e^z - 1| without overflow for large z
    if z > 1:
        return z + math.log1p(-math.exp(-z))
    return math.log(abs(math.expm1(z)))


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"truncation must be a positive integer, got {n}")
    return int(n)


# -- pressure ----------------------------------------------------------------


def pressure_full(p, t: float) -> float:
    """P(-t log psi) on the full digit alphabet; +inf for t <= 0."""
    p = Prime(p)
    if t <= 0:
        return INF
    return math.log(p - 1) - _log_abs_expm1(t * math.log(p))


def pressure_truncated(p, n: int, t: float) -> float:
    """P_n(-t log psi) for valuation digits bounded by n."""
    p = Prime(p)
    n = _check_n(n)
    L = math.log(p)
    if t == 0:
        return math.log(p - 1) + math.log(n)
    z = t * L
    return math.log(p - 1) + _log_abs_expm1(n * z) - n * z - _log_abs_expm1(z)


def dpressure_full(p, t: float) -> float:
    p = Prime(p)
    if t <= 0:
        raise OutOfDomain(f"pressure is infinite for t = {t} <= 0")
    L = math.log(p)
    return L / math.expm1(-t * L)


def dpressure_truncated(p, n: int, t: float) -> float:
    """d/dt P_n(-t log psi) = log p * (n/(p^tn - 1) - p^t/(p^t - 1))."""
    p = Prime(p)
    n = _check_n(n)
    L = math.log(p)
    z = t * L
    if abs(n * z) < 1e-3:
        # Bernoulli-number series about t = 0
        return L * (-(n + 1) / 2 + (n * n - 1) * z / 12 - (n**4 - 1) * z**3 / 720)
    if z > 0:
        first = n * math.exp(-n * z) / -math.expm1(-n * z)
        second = 1 / -math.expm1(-z)
    else:
        first = n / math.expm1(n * z)
        second = math.exp(z) / math.expm1(z)
    return L * (first - second)


def _d2pressure_truncated(p: int, n: int, t: float) -> float:
    # variance of a * log p under the truncated Gibbs law
    L = math.log(p)
    z = t * L
    if abs(n * z) < 1e-3:
        return L * L * ((n * n - 1) / 12 - (n**4 - 1) * z * z / 240)
    return L * L * (0.25 / math.sinh(z / 2) ** 2 - 0.25 * n * n / math.sinh(n * z / 2) ** 2)


# -- t_alpha -----------------------------------------------------------------


def t_alpha_full(p, alpha: float) -> float:
    """The t solving P'(t) = -alpha on the full alphabet."""
    p = Prime(p)
    L = math.log(p)
    if alpha < L:
        raise OutOfDomain(f"alpha = {alpha} < log p = {L}")
    if alpha == L:
        raise AtBoundary("t_alpha is +infinity at alpha = log p")
    return math.log(alpha / (alpha - L)) / L


def t_alpha_truncated(p, n: int, alpha: float) -> float:
    """The t solving P_n'(t) = -alpha for log p < alpha < n log p.

    Bisection on the strictly monotone derivative down to width 1e-13,
    followed by at most five Newton steps.
    """
    p = Prime(p)
    n = _check_n(n)
    L = math.log(p)
    if not L < alpha < n * L:
        raise OutOfDomain(f"alpha = {alpha} outside ({L}, {n * L})")

    def g(t):
        return dpressure_truncated(p, n, t) + alpha

    lo, hi = -1.0, 1.0
    while g(lo) >= 0:
        lo *= 2
        if lo < -1e6:
            raise OutOfDomain(f"alpha = {alpha} too close to n log p")
    while g(hi) <= 0:
        hi *= 2
        if hi > 1e6:
            raise OutOfDomain(f"alpha = {alpha} too close to log p")
    t = optimize.bisect(g, lo, hi, xtol=1e-13)
    r = g(t)
    for _ in range(5):
        if r == 0:
            break
        t_new = t - r / _d2pressure_truncated(p, n, t)
        r_new = g(t_new)
        if abs(r_new) >= abs(r):
            break
        t, r = t_new, r_new
    return t


def level_polynomial(n: int, alpha_hat: float, X: float) -> float:
    """X^n (K+1) + X^(n-1) + ... + X - (K+n) with K = -alpha_hat.

    p^t_alpha is a root (X = 1 is always a spurious one).
    """
    K = -alpha_hat
    return X**n * (K + 1) + sum(X**j for j in range(1, n)) - (K + n)


# -- spectra -----------------------------------------------------------------


def spectrum_full(p, alpha: float) -> SpectrumPoint:
    """Closed-form Lyapunov spectrum L_p(alpha) for alpha >= log p."""
    p = Prime(p)
    L = math.log(p)
    if alpha < L:
        raise OutOfDomain(f"alpha = {alpha} < log p = {L}")
    if alpha == L:
        return SpectrumPoint(p, alpha, INF, -INF, math.log(p - 1) / L)
    # the (1 - alpha/L) log(alpha - L) form keeps the alpha -> log p limit finite
    num = (
        math.log(p - 1)
        - math.log(L)
        + alpha * math.log(alpha) / L
        + (1 - alpha / L) * math.log(alpha - L)
    )
    t = t_alpha_full(p, alpha)
    P = math.log((p - 1) * (alpha - L) / L)
    return SpectrumPoint(p, alpha, t, P, num / alpha)


def spectrum_digit_mean(p, alpha_hat: float) -> float:
    """Dimension of the points whose valuation digits have mean alpha_hat."""
    p = Prime(p)
    if alpha_hat < 1:
        raise OutOfDomain(f"alpha_hat = {alpha_hat} < 1")

    def xlogx(x):
        return x * math.log(x) if x > 0 else 0.0

    return (xlogx(alpha_hat) - xlogx(alpha_hat - 1) + math.log(p - 1)) / (alpha_hat * math.log(p))


def spectrum_truncated(p, n: int, alpha: float) -> SpectrumPoint:
    """Lyapunov spectrum L_{p,n}(alpha) of the subsystem with digits a <= n."""
    p = Prime(p)
    n = _check_n(n)
    L = math.log(p)
    if not L <= alpha <= n * L:
        raise OutOfDomain(f"alpha = {alpha} outside [{L}, {n * L}]")
    if alpha == L:
        return SpectrumPoint(p, alpha, INF, -INF, math.log(p - 1) / L, n)
    if alpha == n * L:
        return SpectrumPoint(p, alpha, -INF, INF, math.log(p - 1) / (n * L), n)
    t = t_alpha_truncated(p, n, alpha)
    P = pressure_truncated(p, n, t)
    return SpectrumPoint(p, alpha, t, P, P / alpha + t, n)


def spectrum_two_digit(p, alpha: float) -> float:
    """Explicit L_{p,2}(alpha) on the open interval (log p, 2 log p)."""
    p = Prime(p)
    L = math.log(p)
    if not L < alpha < 2 * L:
        raise OutOfDomain(f"alpha = {alpha} outside ({L}, {2 * L})")
    return (
        (math.log(p - 1) + math.log(L)) / alpha
        + math.log(alpha - L) * (1 / alpha - 1 / L)
        + math.log(2 * L - alpha) * (1 / L - 2 / alpha)
    )


def _golden_min(f, lo, hi, tol=1e-12, maxiter=500):
    invphi = (math.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if hi - lo <= tol * max(1.0, abs(lo) + abs(hi)):
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2


def legendre_numeric(
    pressure: Callable[[float], float],
    alpha: float,
    domain: tuple[float, float] = (-INF, INF),
    max_expand: int = 80,
) -> float:
    """(1/alpha) * inf_t {P(t) + t alpha}, by golden-section search.

    The search interval is bracketed by a sign change of the numerical slope
    of the objective; infinite pressure values count as a negative slope.
    """
    t_min, t_max = domain

    def obj(t):
        return pressure(t) + t * alpha

    def slope(t):
        h = 1e-6 * max(1.0, abs(t))
        lo_t = t - h
        if lo_t <= t_min:
            return -INF
        f_lo, f_hi = obj(lo_t), obj(t + h)
        if math.isinf(f_lo):
            return -INF
        return (f_hi - f_lo) / (2 * h)

    if math.isfinite(t_min):
        start = t_min + 1.0
    else:
        start = 0.0
    step = 1.0
    hi = start
    for _ in range(max_expand):
        if slope(hi) > 0:
            break
        hi = start + step
        step *= 2
        if hi >= t_max:
            raise NoMinimum(f"no sign change of the slope for alpha = {alpha}")
    else:
        raise NoMinimum(f"no sign change of the slope for alpha = {alpha}")
    lo, step = start, 1.0
    for _ in range(max_expand):
        if slope(lo) < 0:
            break
        if math.isfinite(t_min):
            lo = t_min + (lo - t_min) / 2
        else:
            lo = start - step
            step *= 2
    else:
        raise NoMinimum(f"no sign change of the slope for alpha = {alpha}")
    t_star = _golden_min(obj, lo, hi)
    return obj(t_star) / alpha


def spectrum_argmax(p, tol: float = 1e-12) -> float:
    """Numerical maximizer of the full Lyapunov spectrum."""
    p = Prime(p)
    L = math.log(p)
    hi = 20 * L * p / (p - 1)
    return _golden_min(lambda a: -spectrum_full(p, a).dimension, L * (1 + 1e-12), hi, tol)


# -- Bowen roots and periodic points ----------------------------------------


def _digit_set(digits: Iterable[int]) -> tuple[int, ...]:
    ds = tuple(sorted({int(a) for a in digits}))
    if not ds:
        raise ValueError("digit set must be nonempty")
    if ds[0] < 1:
        raise ValueError("valuation digits must be >= 1")
    return ds


def _log_partition(p: int, digits: tuple[int, ...], t: float) -> float:
    # log((p - 1) * sum_a p^(-t a)), stable for any sign of t
    L = math.log(p)
    e = np.array([-t * a * L for a in digits])
    top = e.max()
    return math.log(p - 1) + top + math.log(math.fsum(np.exp(e - top)))


def bowen_dimension(p, digits: Iterable[int]) -> float:
    """Root s of (p - 1) * sum_{a in A} p^(-s a) = 1.

    For A = {1, ..., n} this is the Hausdorff dimension of the points whose
    valuation digits never exceed n.
    """
    p = Prime(p)
    ds = _digit_set(digits)

    def g(s):
        return _log_partition(p, ds, s)

    if g(0.0) == 0.0:
        return 0.0
    s = optimize.bisect(g, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    return s


def periodic_pressure(p, digits: Iterable[int], t: float, m: int, method: str = "enumerate") -> float:
    """(1/m) log of the sum over period-m points of exp(S_m(-t log psi)).

    ``method="enumerate"`` walks every length-m digit word (each word is one
    periodic point); ``method="product"`` uses the factorization of that sum.
    """
    p = Prime(p)
    ds = _digit_set(digits)
    if m < 1:
        raise ValueError("period must be >= 1")
    if method == "product":
        return _log_partition(p, ds, t)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    alphabet = [(a, b) for a in ds for b in range(1, p)]
    if len(alphabet) ** m > MAX_ENUMERATION:
        raise TooLarge(f"{len(alphabet)}^{m} words exceed {MAX_ENUMERATION}")
    L = math.log(p)
    terms = [math.exp(-t * L * sum(a for a, _ in word)) for word in itertools.product(alphabet, repeat=m)]
    return math.log(math.fsum(terms)) / m


# -- equilibrium states --------------------------------------------------------


@dataclass(frozen=True)
class GibbsSpec:
    """Bernoulli equilibrium state of -t log psi.

    Digit pairs (a, b) are i.i.d. with weight p^(-t a) / Z, Z = e^P; the
    residue digit b is uniform.  ``truncation=None`` means the full alphabet.
    """

    p: int
    t: float
    truncation: Optional[int]
    pressure: float

    @property
    def log_p(self) -> float:
        return math.log(self.p)

    def weight(self, a: int, b: int) -> float:
        if a < 1 or not 1 <= b <= self.p - 1:
            return 0.0
        if self.truncation is not None and a > self.truncation:
            return 0.0
        return math.exp(-self.t * a * self.log_p - self.pressure)

    def log_weight(self, a):
        """log w(a, b) (independent of b); vectorized over ``a``."""
        return -self.t * np.asarray(a) * self.log_p - self.pressure

    def digit_law(self, a_max: Optional[int] = None) -> np.ndarray:
        """P(a_1 = a) for a = 1..a_max (default: truncation, or until the tail is < 1e-17)."""
        if a_max is None:
            if self.truncation is not None:
                a_max = self.truncation
            else:
                q = self.p ** (-self.t)
                a_max = max(1, math.ceil(math.log(1e-17) / math.log(q)))
        a = np.arange(1, a_max + 1)
        law = (self.p - 1) * np.exp(self.log_weight(a))
        if self.truncation is not None:
            law[a > self.truncation] = 0.0
        return law

    @property
    def weights(self) -> dict:
        """Weights of every digit pair up to the law's cutoff."""
        from .schneider import DigitPair

        law = self.digit_law()
        return {
            DigitPair(a, b): float(law[a - 1]) / (self.p - 1)
            for a in range(1, len(law) + 1)
            for b in range(1, self.p)
        }

    @property
    def mean_digit(self) -> float:
        if self.truncation is None:
            return -dpressure_full(self.p, self.t) / self.log_p
        return -dpressure_truncated(self.p, self.truncation, self.t) / self.log_p

    @property
    def lyapunov(self) -> float:
        return self.log_p * self.mean_digit

    @property
    def entropy(self) -> float:
        # -sum w log w with -log w = t a log p + P
        return self.t * self.lyapunov + self.pressure

    def sample_digits(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw ``size`` i.i.d. digit pairs; a by inverse CDF, b uniform."""
        u = rng.random(size)
        if self.truncation is None:
            q = self.p ** (-self.t)
            a = np.floor(np.log1p(-u) / math.log(q)).astype(np.int64) + 1
        else:
            cdf = np.cumsum(self.digit_law())
            cdf /= cdf[-1]
            a = np.searchsorted(cdf, u, side="right") + 1
            a = np.minimum(a, self.truncation)
        b = rng.integers(1, self.p, size=size)
        return a, b


def gibbs_weights(p, t: float, truncation: Optional[int] = None) -> GibbsSpec:
    p = Prime(p)
    if truncation is None:
        if t <= 0:
            raise DivergentWeights(f"sum of p^(-t a) diverges for t = {t}")
        return GibbsSpec(int(p), float(t), None, pressure_full(p, t))
    n = _check_n(truncation)
    return GibbsSpec(int(p), float(t), n, pressure_truncated(p, n, t))


def dimension_from_measure(spec: GibbsSpec) -> float:
    """Hausdorff dimension of a Gibbs state: entropy / Lyapunov exponent."""
    return spec.entropy / spec.lyapunov


def spectrum(p, alpha: float, truncation: Optional[int] = None) -> SpectrumPoint:
    """Full or truncated spectrum, by ``truncation``."""
    if truncation is None:
        return spectrum_full(p, alpha)
    return spectrum_truncated(p, truncation, alpha)
