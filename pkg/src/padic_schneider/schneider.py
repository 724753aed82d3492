"""The Schneider continued-fraction map on pZ_p.

For x in pZ_p, x != 0, one step of the map strips the pair

    a = v_p(x),   b = p^a / x  (mod p),   T(x) = p^a / x - b,

so that x = p^a / (b + T(x)).  Iterating gives the expansion

    x = p^a1 / (b1 + p^a2 / (b2 + ... + p^an / (bn + T^n(x)))).

Everything here works on two number systems: exact rationals
(:class:`fractions.Fraction`), where expansions may terminate, and
fixed-precision :class:`~padic_schneider.padic_core.PadicInt`, where each
step with digit ``a`` consumes ``a`` digits of precision.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    ExpansionTooShort,
    NotInMaximalIdeal,
    PrecisionExhausted,
    ZeroInput,
)
from .padic_core import (
    PadicInt,
    Prime,
    int_valuation,
    rational_valuation,
    unit_inverse,
    valuation,
)

#: consecutive (1, p-1) pairs needed before a rational tail is declared
TAIL_RUN = 50


@dataclass(frozen=True, order=True)
class DigitPair:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError(f"invalid digit pair ({self.a}, {self.b})")

    def __iter__(self):
        yield self.a
        yield self.b


class Status(str, enum.Enum):
    COMPLETE = "Complete"
    HIT_ZERO = "HitZero"
    PRECISION_EXHAUSTED = "PrecisionExhausted"


@dataclass(frozen=True)
class Expansion:
    """Digit pairs of a point together with how the expansion ended.

    ``remainder`` is the last iterate T^k(x) (a Fraction on the exact path,
    a PadicInt on the p-adic path, None if precision ran out).
    """

    prime: Prime
    pairs: tuple[DigitPair, ...]
    status: Status
    remainder: Union[Fraction, PadicInt, None] = None
    input_precision: Optional[int] = None

    def __len__(self):
        return len(self.pairs)

    @property
    def a_digits(self) -> list[int]:
        return [d.a for d in self.pairs]

    @property
    def remaining_precision(self) -> Optional[int]:
        # each step with digit a consumes a digits of the input precision
        if self.input_precision is None:
            return None
        return self.input_precision - sum(d.a for d in self.pairs)


@dataclass(frozen=True)
class Convergent:
    index: int
    A: int
    B: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.A, self.B)


# -- single steps ------------------------------------------------------------


def step_rational(x, p) -> tuple[DigitPair, Fraction]:
    """One exact Schneider step on a rational in pZ_p."""
    p = Prime(p)
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("T_p is not expanded at 0")
    a = rational_valuation(x, p)
    if a < 1:
        raise NotInMaximalIdeal(f"v_{p}({x}) = {a} < 1")
    y = Fraction(p**a) / x
    b = y.numerator * pow(y.denominator, -1, p) % p
    return DigitPair(a, b), y - b


def step_padic(x: PadicInt) -> tuple[DigitPair, PadicInt]:
    """One Schneider step on a p-adic integer, via unit inversion.

    The result is known to precision N - a.
    """
    p = x.prime
    a = valuation(x)
    if a < 1:
        raise NotInMaximalIdeal(f"digit 0 of {x} is nonzero")
    u = PadicInt(p, x.value // p**a, x.precision - a)
    inv = unit_inverse(u)
    b = inv.value % p
    return DigitPair(a, b), PadicInt(p, inv.value - b, inv.precision)


# -- expansions --------------------------------------------------------------


def expand(x, depth: int, prime=None, remainder: bool = True) -> Expansion:
    """Schneider expansion of ``x`` to at most ``depth`` pairs.

    ``x`` may be a PadicInt or an exact rational (int/Fraction, in which case
    ``prime`` is required).  On the p-adic path the final iterate costs one
    full-precision inversion; pass ``remainder=False`` to skip it.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(x, PadicInt):
        if prime is not None and Prime(prime) != x.prime:
            raise ValueError("prime argument disagrees with the PadicInt")
        return _expand_padic(x, depth, remainder)
    if prime is None:
        raise ValueError("prime is required for rational input")
    return _expand_rational(Fraction(x), Prime(prime), depth)


def _expand_rational(x: Fraction, p: Prime, depth: int) -> Expansion:
    if x == 0:
        raise ZeroInput("0 has the empty expansion")
    if rational_valuation(x, p) < 1:
        raise NotInMaximalIdeal(f"{x} is not in {p}Z_{p}")
    pairs = []
    y = x
    for _ in range(depth):
        pair, y = step_rational(y, p)
        pairs.append(pair)
        if y == 0:
            return Expansion(p, tuple(pairs), Status.HIT_ZERO, y)
    return Expansion(p, tuple(pairs), Status.COMPLETE, y)


def _expand_padic(x: PadicInt, depth: int, remainder: bool = True) -> Expansion:
    p = x.prime
    a_out, b_out, state = padic_digit_stream(x, depth)
    pairs = tuple(map(DigitPair, a_out, b_out))
    if state is None:
        return Expansion(p, pairs, Status.PRECISION_EXHAUSTED, None, x.precision)
    rem = None
    if remainder:
        N, D, prec = state
        rem = PadicInt(p, N * unit_inverse(PadicInt(p, D, prec)).value, prec)
    return Expansion(p, pairs, Status.COMPLETE, rem, x.precision)


def padic_digit_stream(x: PadicInt, depth: int):
    """Raw digit lists ``(a_list, b_list, state)`` of the p-adic expansion.

    ``state`` is ``(N, D, prec)`` with T^k(x) = N/D mod p^prec, or None when
    precision ran out before ``depth`` pairs.
    """
    # The iterate is carried as N/D with D a unit:  with N = p^a u,
    #     T(N/D) = D/u - b = (D - b u) / u,
    # i.e. (N, D) <- M (N, D) / p^a with M = [[-b, p^a], [1, 0]].  Digits only
    # depend on low-order residues, so steps run on word-sized residues mod p^K
    # while M accumulates; the full-precision pair is updated once per block.
    p = x.prime
    if x.value == 0:
        raise PrecisionExhausted(f"all {x.precision} known digits are zero")
    if x.value % p != 0:
        raise NotInMaximalIdeal(f"digit 0 of {x} is nonzero")
    K = _block_digits(p)
    pw = _small_powers(p, K)
    inv = [0] + [pow(r, -1, p) for r in range(1, p)]
    btab = _digit_table(p)
    N, D, prec = x.value, 1, x.precision
    m = p**prec
    a_out, b_out = [], []
    exhausted = False
    while len(a_out) < depth:
        if prec < 2 or N == 0:
            exhausted = True
            break
        k = min(K, prec)
        n, d, kp = N % pw[k], D % pw[k], k
        todo = depth - len(a_out)
        if p == 2:
            steps, S, (m11, m12, m21, m22) = _block_p2(n, d, kp, todo, a_out, b_out)
        else:
            steps, S, (m11, m12, m21, m22) = _block(n, d, kp, todo, p, pw, btab, a_out, b_out)
        if steps == 0:
            if k == prec:
                exhausted = True
                break
            # at least K leading zero digits: take one step at full size
            a = int_valuation(N % m, p)
            qa = p**a
            prec -= a
            m //= qa
            u = N % (m * qa) // qa % m
            b = D % p * inv[u % p] % p
            N, D = (D - b * u) % m, u
            a_out.append(a)
            b_out.append(b)
            continue
        qS = p**S
        N, D = (m11 * N + m12 * D) % m // qS, (m21 * N + m22 * D) % m // qS
        m //= qS
        prec -= S
    if exhausted:
        return a_out, b_out, None
    return a_out, b_out, (N, D, prec)


def _block(n, d, kp, todo, p, pw, btab, a_out, b_out):
    # Schneider steps on residues n/d mod p^kp; returns the step count, the
    # consumed precision and the accumulated matrix.
    m11, m12, m21, m22 = 1, 0, 0, 1
    steps = S = 0
    p2 = pw[2]
    while steps < todo and kp >= 2 and n:
        if n % p2:
            a = 1
        else:
            a = 2
            while n % pw[a + 1] == 0:
                a += 1
        kp -= a
        q = pw[a]
        u = n // q
        b = btab[d % p][u % p]
        mod = pw[kp]
        n, d = (d - b * u) % mod, u % mod
        m11, m12, m21, m22 = q * m21 - b * m11, q * m22 - b * m12, m11, m12
        S += a
        a_out.append(a)
        b_out.append(b)
        steps += 1
    return steps, S, (m11, m12, m21, m22)


def _block_p2(n, d, kp, todo, a_out, b_out):
    # p = 2: every b digit is 1 and residues reduce by masking
    m11, m12, m21, m22 = 1, 0, 0, 1
    steps = S = 0
    while steps < todo and kp >= 2 and n:
        a = (n & -n).bit_length() - 1
        kp -= a
        u = n >> a
        mask = (1 << kp) - 1
        n, d = (d - u) & mask, u & mask
        m11, m12, m21, m22 = (m21 << a) - m11, (m22 << a) - m12, m11, m12
        S += a
        a_out.append(a)
        b_out.append(1)
        steps += 1
    return steps, S, (m11, m12, m21, m22)


@functools.lru_cache(maxsize=None)
def _digit_table(p: int) -> tuple[tuple[int, ...], ...]:
    # b = d / u mod p, indexed by residues of d and u
    return tuple(tuple(d * pow(u, -1, p) % p if u else 0 for u in range(p)) for d in range(p))


@functools.lru_cache(maxsize=None)
def _block_digits(p: int) -> int:
    # residues below 2^120 keep the inner loop on two-word integers
    return max(2, int(120 / math.log2(p)))


@functools.lru_cache(maxsize=None)
def _small_powers(p: int, k: int) -> tuple[int, ...]:
    return tuple(p**i for i in range(k + 2))


def as_pairs(word) -> list[DigitPair]:
    return [w if isinstance(w, DigitPair) else DigitPair(*w) for w in word]


def evaluate_word(word, p, tail=0) -> Fraction:
    """Bottom-up evaluation of the finite fraction for ``word`` with remainder ``tail``."""
    v = Fraction(tail)
    for a, b in reversed(as_pairs(word)):
        v = Fraction(p**a) / (b + v)
    return v


# -- convergents -------------------------------------------------------------


def convergent_pairs(pairs, p) -> list[tuple[int, int]]:
    """(A_n, B_n) for n = 0..len(pairs) from the three-term recurrence."""
    A_prev, B_prev = 1, 0
    A, B = 0, 1
    out = [(A, B)]
    for a, b in as_pairs(pairs):
        q = p**a
        A, A_prev = b * A + q * A_prev, A
        B, B_prev = b * B + q * B_prev, B
        out.append((A, B))
    return out


def convergents(e: Union[Expansion, Sequence]) -> list[Convergent]:
    """Convergents A_n/B_n, n = 1..len, of an expansion.

    A plain word of pairs is accepted too when passed as ``(word, p)``.
    """
    if isinstance(e, Expansion):
        pairs, p = e.pairs, e.prime
    else:
        pairs, p = e
    if not pairs:
        raise ExpansionTooShort("no digit pairs")
    AB = convergent_pairs(pairs, p)
    return [Convergent(n, A, B) for n, (A, B) in enumerate(AB) if n > 0]


# -- exponents -----------------------------------------------------------------


def approx_error_valuation(x, n: int, p) -> int:
    """v_p(x - A_n/B_n) for an exact rational x (equals a_1 + ... + a_{n+1})."""
    p = Prime(p)
    x = Fraction(x)
    e = expand(x, n + 1, p)
    if len(e) < n + 1:
        raise ExpansionTooShort(f"{x} has only {len(e)} digit pairs, need {n + 1}")
    A, B = convergent_pairs(e.pairs[:n], p)[n]
    return rational_valuation(x - Fraction(A, B), p)


def lyapunov_estimate(e: Expansion, n: int) -> float:
    """Birkhoff mean log(p) * (a_1 + ... + a_n) / n."""
    if n < 1:
        raise ValueError("n must be positive")
    if len(e) < n:
        raise ExpansionTooShort(f"expansion has {len(e)} pairs, need {n}")
    return math.log(e.prime) * sum(d.a for d in e.pairs[:n]) / n


def approximation_exponent(x, n: int, p) -> float:
    """-(1/n) log |x - p_n/q_n|_p."""
    if n < 1:
        raise ValueError("n must be positive")
    return math.log(p) * approx_error_valuation(x, n, p) / n


# -- fixed points --------------------------------------------------------------


def fixed_point(a: int, b: int, p, precision: int) -> PadicInt:
    """The fixed point of T_p inside the cylinder (a, b).

    Hensel-lifts the root x = 0 (mod p) of x^2 + b x - p^a with Newton
    steps; f'(x) = 2x + b is a unit there.
    """
    p = Prime(p)
    if a < 1 or not 1 <= b <= p - 1:
        raise ValueError(f"invalid digit pair ({a}, {b})")
    c = p**a
    x, k = 0, 1
    while True:
        m = p**k
        fx = x * x + b * x - c
        x = (x - fx * pow(2 * x + b, -1, m)) % m
        if k >= precision:
            break
        k = min(2 * k, precision)
    return PadicInt(p, x, precision)


# -- Diophantine potentials ----------------------------------------------------


def _psi2(x: Fraction, p: Prime) -> Fraction:
    # p^(-a1) * |x - p^a1 / b1|_p^(-1), exactly
    (a, b), _ = step_rational(x, p)
    diff = x - Fraction(p**a, b)
    if diff == 0:
        raise ExpansionTooShort(f"{x} has a one-pair expansion")
    return Fraction(p) ** (rational_valuation(diff, p) - a)


def phi(x, p) -> Fraction:
    """phi(x) = p^a2 * psi2(T x) / psi2(x), evaluated literally in exact arithmetic."""
    p = Prime(p)
    x = Fraction(x)
    e = expand(x, 3, p)
    if len(e) < 3:
        raise ExpansionTooShort(f"{x} has fewer than 3 digit pairs")
    _, tx = step_rational(x, p)
    return Fraction(p ** e.pairs[1].a) * _psi2(tx, p) / _psi2(x, p)


# -- rational tails ------------------------------------------------------------


@dataclass(frozen=True)
class TailResult:
    """Outcome of :func:`rational_tail_check`.

    ``kind`` is "Finite", "TailReached" or "NotReached"; ``index`` is the
    1-based start of the (1, p-1) tail, the expansion length when finite, or
    the number of steps taken.
    """

    kind: str
    index: int


def rational_tail_check(x, p, max_steps: int = 5000) -> TailResult:
    """Classify the exact expansion of a rational in pZ_p.

    A tail is reported once TAIL_RUN consecutive (1, p-1) pairs are seen and
    the iterate at the start of the run is exactly the fixed point -p.
    """
    p = Prime(p)
    y = Fraction(x)
    if y == 0:
        return TailResult("Finite", 0)
    run_start, run_len, run_point = None, 0, None
    for i in range(1, max_steps + 1):
        prev = y
        pair, y = step_rational(y, p)
        if pair.a == 1 and pair.b == p - 1:
            if run_len == 0:
                run_start, run_point = i, prev
            run_len += 1
            if run_len >= TAIL_RUN and run_point == -p:
                return TailResult("TailReached", run_start)
        else:
            run_len = 0
        if y == 0:
            return TailResult("Finite", i)
    return TailResult("NotReached", max_steps)
