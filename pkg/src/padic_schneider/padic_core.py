"""Fixed-precision arithmetic in the p-adic integers.

A :class:`PadicInt` is an element of Z_p known modulo p^N.  Internally the
value is held as a Python integer in ``[0, p^N)``; the base-p digit vector
(least significant first) is exposed through :attr:`PadicInt.digits`.

Precision only ever shrinks: binary operations return the smaller of the two
operand precisions and nothing pads unknown digits with zeros.

Exact rationals are represented with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import (
    NegativeValuation,
    NotAUnit,
    PrecisionExhausted,
    PrimeMismatch,
    ZeroInput,
)

Rational = Union[Fraction, int]


class Prime(int):
    """A prime number, checked by trial division at construction."""

    def __new__(cls, value):
        if isinstance(value, Prime):
            return value
        if isinstance(value, bool) or int(value) != value:
            raise ValueError(f"prime must be an integer, got {value!r}")
        value = int(value)
        if not is_prime(value):
            raise ValueError(f"{value} is not a prime")
        return super().__new__(cls, value)

    def __repr__(self):
        return f"Prime({int(self)})"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def int_valuation(n: int, p: int) -> int:
    """Exponent of p in the nonzero integer n."""
    if n == 0:
        raise ZeroInput("valuation of 0 is infinite")
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    k = 0
    # strip large powers first so long runs of zeros cost O(log) divisions
    step, pk = 1, p
    while n % pk == 0:
        n //= pk
        k += step
        step, pk = step * 2, pk * pk
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class PadicInt:
    """Element of Z_p known modulo p^precision."""

    prime: Prime
    value: int
    precision: int

    def __post_init__(self):
        object.__setattr__(self, "prime", Prime(self.prime))
        if self.precision < 1:
            raise ValueError("precision must be at least 1")
        object.__setattr__(self, "value", self.value % self.modulus)

    @classmethod
    def from_digits(cls, prime, digits: Sequence[int]) -> "PadicInt":
        p = Prime(prime)
        digits = [int(d) for d in digits]
        if not digits:
            raise ValueError("at least one digit is required")
        if any(d < 0 or d >= p for d in digits):
            raise ValueError(f"digits must lie in [0, {p})")
        return cls(p, digits_to_int(digits, p), len(digits))

    @classmethod
    def from_int(cls, n: int, prime, precision: int) -> "PadicInt":
        return cls(Prime(prime), n, precision)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    @property
    def digits(self) -> tuple[int, ...]:
        p, v = self.prime, self.value
        out = []
        for _ in range(self.precision):
            v, d = divmod(v, p)
            out.append(d)
        return tuple(out)

    def is_unit(self) -> bool:
        return self.value % self.prime != 0

    def __add__(self, other):
        return add(self, _coerce(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(other, self))

    def __rsub__(self, other):
        return sub(_coerce(other, self), self)

    def __mul__(self, other):
        return mul(self, _coerce(other, self))

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(self.prime, -self.value, self.precision)

    def __repr__(self):
        return f"PadicInt(p={int(self.prime)}, digits={self.digits}, N={self.precision})"


def _coerce(other, like: PadicInt) -> PadicInt:
    if isinstance(other, PadicInt):
        return other
    if isinstance(other, (int, Fraction)):
        return from_rational(other, like.prime, like.precision)
    return NotImplemented


def _check_primes(x: PadicInt, y: PadicInt):
    if x.prime != y.prime:
        raise PrimeMismatch(f"p={x.prime} vs p={y.prime}")
    return min(x.precision, y.precision)


def add(x: PadicInt, y: PadicInt) -> PadicInt:
    n = _check_primes(x, y)
    return PadicInt(x.prime, x.value + y.value, n)


def sub(x: PadicInt, y: PadicInt) -> PadicInt:
    n = _check_primes(x, y)
    return PadicInt(x.prime, x.value - y.value, n)


def mul(x: PadicInt, y: PadicInt) -> PadicInt:
    n = _check_primes(x, y)
    return PadicInt(x.prime, x.value * y.value, n)


def valuation(x: PadicInt) -> int:
    """Index of the first nonzero digit of x.

    Raises PrecisionExhausted when every known digit is zero.
    """
    if x.value == 0:
        raise PrecisionExhausted(f"all {x.precision} known digits are zero")
    return int_valuation(x.value, x.prime)


def rational_valuation(x: Rational, p) -> int:
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("valuation of 0 is infinite")
    p = Prime(p)
    num, den = x.numerator, x.denominator
    if num % p == 0:
        return int_valuation(num, p)
    if den % p == 0:
        return -int_valuation(den, p)
    return 0


def unit_inverse(u: PadicInt) -> PadicInt:
    """Inverse of a unit by Newton iteration y <- y(2 - uy).

    Starts from the inverse mod p and doubles the number of correct digits
    each round until the full precision of u is reached.
    """
    p = u.prime
    u0 = u.value % p
    if u0 == 0:
        raise NotAUnit("digit 0 is zero")
    y = pow(u0, -1, p)
    k = 1
    while k < u.precision:
        k = min(2 * k, u.precision)
        m = p**k
        y = y * (2 - u.value * y) % m
    return PadicInt(p, y, u.precision)


def from_rational(x: Rational, p, precision: int) -> PadicInt:
    """Image of a rational with v_p(x) >= 0 in Z_p / p^N."""
    p = Prime(p)
    x = Fraction(x)
    if x.denominator % p == 0:
        raise NegativeValuation(f"{x} has negative {p}-adic valuation")
    m = p**precision
    return PadicInt(p, x.numerator * pow(x.denominator, -1, m), precision)


def digits_to_int(digits, p: int) -> int:
    """Integer with the given base-p digits (least significant first)."""
    digits = np.asarray(digits, dtype=np.int64)
    if digits.size == 0:
        return 0
    if p == 2:
        packed = np.packbits(digits.astype(np.uint8), bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")
    k = max(1, int(62 / math.log2(p)))
    pad = (-digits.size) % k
    chunks = np.concatenate([digits, np.zeros(pad, dtype=np.int64)]).reshape(-1, k)
    weights = np.array([p**i for i in range(k)], dtype=np.int64)
    values = chunks @ weights
    base = p**k
    out = 0
    for c in values[::-1]:
        out = out * base + int(c)
    return out


def haar_sample(p, precision: int, rng: np.random.Generator) -> PadicInt:
    """Draw a point of pZ_p from the normalized Haar measure, mod p^N.

    Digit 0 is zero; the remaining N-1 digits are i.i.d. uniform.
    """
    p = Prime(p)
    if precision < 2:
        raise ValueError("Haar sampling on pZ_p needs precision >= 2")
    digits = rng.integers(0, p, size=precision - 1)
    return PadicInt(p, p * digits_to_int(digits, p), precision)
