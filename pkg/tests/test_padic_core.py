from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import stats

from padic_schneider.errors import NegativeValuation, NotAUnit, PrecisionExhausted, PrimeMismatch, ZeroInput
from padic_schneider.padic_core import (
    PadicInt,
    Prime,
    digits_to_int,
    from_rational,
    haar_sample,
    is_prime,
    mul,
    rational_valuation,
    unit_inverse,
    valuation,
)

from oracles import base_p_digits, egcd_inverse, valuation_by_division

primes = st.sampled_from([2, 3, 5, 7, 11, 13, 101])
precisions = st.integers(1, 80)


def rationals_for(p):
    return st.builds(
        Fraction,
        st.integers(-(10**9), 10**9),
        st.integers(1, 10**9).filter(lambda d: d % p != 0),
    )


def test_prime_rejects_composites():
    assert Prime(7) == 7
    for bad in (0, 1, 4, 9, 91, 7919 * 7):
        with pytest.raises(ValueError):
            Prime(bad)
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_valuation_examples():
    assert valuation(PadicInt.from_digits(2, (0, 0, 1, 1))) == 2
    with pytest.raises(PrecisionExhausted):
        valuation(PadicInt.from_digits(3, (0,) * 8))
    assert valuation(from_rational(Fraction(2, 3), 2, 8)) == 1


def test_rational_valuation_examples():
    assert rational_valuation(Fraction(2, 3), 2) == 1
    assert rational_valuation(Fraction(9, 4), 3) == 2
    assert rational_valuation(Fraction(1, 5), 5) == -1
    with pytest.raises(ZeroInput):
        rational_valuation(0, 3)


def test_unit_inverse_examples():
    assert unit_inverse(PadicInt(5, 1, 9)).value == 1
    inv = unit_inverse(PadicInt(2, 3, 4))
    assert inv.digits == (1, 1, 0, 1) and inv.value == 11
    with pytest.raises(NotAUnit):
        unit_inverse(PadicInt(3, 6, 5))


def test_arithmetic_examples():
    x = PadicInt(7, 12345, 6)
    assert x + 0 == x
    assert (PadicInt(5, 4, 3) + PadicInt(5, 1, 3)).digits == (0, 1, 0)
    assert mul(PadicInt(2, 3, 4), PadicInt(2, 11, 4)).value == 1
    assert (PadicInt(3, 1, 10) * PadicInt(3, 2, 4)).precision == 4
    with pytest.raises(PrimeMismatch):
        PadicInt(2, 1, 4) + PadicInt(3, 1, 4)


def test_from_rational_examples():
    assert from_rational(Fraction(1, 3), 2, 4).digits == (1, 1, 0, 1)
    assert from_rational(-2, 2, 4).digits == (0, 1, 1, 1)
    with pytest.raises(NegativeValuation):
        from_rational(Fraction(1, 2), 2, 4)


@given(primes, precisions, st.data())
def test_from_rational_matches_egcd_oracle(p, N, data):
    x = data.draw(rationals_for(p))
    got = from_rational(x, p, N)
    want = x.numerator * egcd_inverse(x.denominator, p**N) % p**N
    assert got.value == want
    assert got.digits == base_p_digits(want, p, N)
    assert (got.value * x.denominator - x.numerator) % p**N == 0


@given(primes, precisions, st.data())
def test_unit_inverse_property(p, N, data):
    u = data.draw(st.integers(0, p**N - 1).filter(lambda v: v % p != 0))
    y = unit_inverse(PadicInt(p, u, N))
    assert (y.value * u) % p**N == 1
    assert y.value == egcd_inverse(u, p**N)


@given(primes, precisions, st.data())
def test_from_rational_is_ring_morphism(p, N, data):
    x, y = data.draw(rationals_for(p)), data.draw(rationals_for(p))
    X, Y = from_rational(x, p, N), from_rational(y, p, N)
    assert X * Y == from_rational(x * y, p, N)
    assert X + Y == from_rational(x + y, p, N)
    assert X - Y == from_rational(x - y, p, N)


@given(primes, st.integers(2, 60), st.data())
def test_valuation_is_additive(p, N, data):
    x = data.draw(st.integers(1, p**N - 1))
    y = data.draw(st.integers(1, p**N - 1))
    X, Y = PadicInt(p, x, N), PadicInt(p, y, N)
    vx, vy = valuation(X), valuation(Y)
    assume(vx + vy < N)
    assert valuation(mul(X, Y)) == vx + vy


@given(primes, st.data())
def test_rational_valuation_matches_division(p, data):
    x = data.draw(st.fractions().filter(lambda f: f != 0))
    assert rational_valuation(x, p) == valuation_by_division(x, p)


@given(primes, st.lists(st.integers(0, 100), min_size=1, max_size=200))
def test_digits_roundtrip(p, raw):
    digits = [d % p for d in raw]
    assert PadicInt.from_digits(p, digits).digits == tuple(digits)
    assert digits_to_int(digits, p) == sum(d * p**i for i, d in enumerate(digits))


def test_haar_sample_support_and_determinism():
    for p in (2, 3, 7):
        x = haar_sample(p, 40, np.random.default_rng(5))
        y = haar_sample(p, 40, np.random.default_rng(5))
        assert x == y and x.digits[0] == 0 and x.precision == 40
    with pytest.raises(ValueError):
        haar_sample(2, 1, np.random.default_rng(0))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_haar_digits_uniform_chi_square(p):
    rng = np.random.default_rng(1234 + p)
    digits = []
    for _ in range(1000):
        digits.extend(haar_sample(p, 1001, rng).digits[1:])
    counts = np.bincount(digits, minlength=p)
    assert counts.sum() == 10**6
    assert stats.chisquare(counts).pvalue > 0.001


@pytest.mark.parametrize("p", [2, 3])
def test_haar_valuation_law(p):
    rng = np.random.default_rng(99)
    vals = np.array([valuation(haar_sample(p, 60, rng)) for _ in range(10**5)])
    for a in range(1, 6):
        q = (p - 1) * p ** (-a)
        sigma = np.sqrt(q * (1 - q) / vals.size)
        assert abs(np.mean(vals == a) - q) < 4 * sigma
