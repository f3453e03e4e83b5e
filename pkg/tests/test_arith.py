import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arbor_cubic.arith import (
    IncompleteFactorization,
    factor,
    format_rational,
    is_prime,
    is_rational_square,
    parse_rational,
    val,
)


def naive_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@pytest.mark.parametrize("text,value", [("0", 0), ("-31/5", Fraction(-31, 5)), ("6/4", Fraction(3, 2)), ("-827/4", Fraction(-827, 4))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["3.5", "", "a/b", "1//2", "--3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


@given(st.fractions())
def test_format_parse_round_trip(x):
    assert parse_rational(format_rational(x)) == x


def test_is_prime_small_range_matches_trial_division():
    for n in range(-5, 3000):
        assert is_prime(n) == naive_is_prime(n), n


def test_is_prime_known_values():
    assert is_prime(722144241378612874253)
    assert is_prime(2**127 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_prime((2**61 - 1) * (2**31 - 1))


def test_valuation():
    assert val(11, Fraction(-144, 11)) == -1
    assert val(2, Fraction(-827, 4)) == -2
    assert val(3, 162) == 4
    with pytest.raises(ValueError):
        val(11, 0)
    with pytest.raises(ValueError):
        val(4, 2)


@given(st.integers(min_value=2, max_value=10**12))
def test_factor_multiplies_back(n):
    fac = factor(n)
    assert fac.value == n
    assert all(is_prime(p) for p in fac.primes)


def test_factor_large_semiprime():
    p, q = 1000003, 722144241378612874253
    assert factor(p * q).primes == [p, q]


def test_factor_bound_reports_cofactor():
    p, q = 2**61 - 1, 2**89 - 1
    n = 2 * 3 * p * q
    with pytest.raises(IncompleteFactorization) as err:
        factor(n, bound=2**64)
    assert err.value.cofactor * err.value.partial.value == n


@given(st.fractions(), st.integers(min_value=1, max_value=50))
def test_squares(x, k):
    assert is_rational_square(x * x)
    assert not is_rational_square(-k)


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")
