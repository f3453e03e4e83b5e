"""Exact scalars: rational parsing, p-adic valuations, desk-scale factorization.

Rationals are :class:`fractions.Fraction` throughout; this module adds the
number theory the rest of the package needs on top of it.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction
RationalLike = Union[int, Fraction]

TRIAL_LIMIT = 10**6
DEFAULT_FACTOR_BOUND = 2**128

_LITERAL = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse a literal like ``-31/5`` or ``9``; no whitespace, no decimals."""
    if not isinstance(text, str) or not _LITERAL.match(text):
        raise ValueError(f"malformed rational literal: {text!r}")
    value = Fraction(text)
    if "/" in text and int(text.split("/")[1]) == 0:
        raise ZeroDivisionError("zero denominator in rational literal")
    return value


def format_rational(x: RationalLike) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# -- primality -------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    if math.isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4

    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def half(x: int) -> int:
        x %= n
        return (x + n) // 2 if x % 2 else x // 2

    U, V, Qk = 0, 2, 1  # U_0, V_0, Q^0
    for bit in bin(d)[2:]:
        U, V, Qk = U * V % n, (V * V - 2 * Qk) % n, Qk * Qk % n
        if bit == "1":
            U, V = half(P * U + V), half(D * U + P * V)
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 2**64, Baillie-PSW above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 2**64:
        return all(_strong_probable_prime(n, a) for a in _SMALL_PRIMES)
    return _strong_probable_prime(n, 2) and _strong_lucas_probable_prime(n)


# -- valuations ------------------------------------------------------------

def _require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def _int_val(p: int, n: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def val(p: int, x: RationalLike) -> int:
    """p-adic valuation of a nonzero rational."""
    _require_prime(p)
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    return _int_val(p, abs(x.numerator)) - _int_val(p, x.denominator)


# -- factorization ---------------------------------------------------------

class IncompleteFactorization(ArithmeticError):
    def __init__(self, partial: "Factorization", cofactor: int):
        self.partial = partial
        self.cofactor = cofactor
        super().__init__(f"incomplete factorization: unfactored cofactor {cofactor}")


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __str__(self) -> str:
        body = "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors) or "1"
        return ("-" if self.sign < 0 else "") + body


def _primes_below(limit: int) -> list[int]:
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit, i)))
    return [i for i, flag in enumerate(sieve) if flag]


_TRIAL_PRIMES: list[int] = []


def _trial_primes() -> list[int]:
    if not _TRIAL_PRIMES:
        _TRIAL_PRIMES.extend(_primes_below(TRIAL_LIMIT))
    return _TRIAL_PRIMES


def pollard_brent(n: int, rng: random.Random) -> int:
    """Return a nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor(n: int, bound: int = DEFAULT_FACTOR_BOUND, seed: int = 0) -> Factorization:
    """Complete factorization of a nonzero integer.

    Trial division up to 10**6, then Pollard-Brent on the cofactor. Raises
    :class:`IncompleteFactorization` when a composite cofactor exceeds
    ``bound``.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError("factor expects an int")
    if n == 0:
        raise ValueError("cannot factor zero")
    sign = -1 if n < 0 else 1
    n = abs(n)
    found: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    leftover = 1
    while stack:
        m = stack.pop()
        if m < TRIAL_LIMIT**2 or is_prime(m):
            # anything below 10**12 surviving trial division is prime
            found[m] = found.get(m, 0) + 1
            continue
        if m > bound:
            leftover *= m
            continue
        d = pollard_brent(m, rng)
        stack.extend((d, m // d))
    result = Factorization(sign, tuple(sorted(found.items())))
    if leftover != 1:
        raise IncompleteFactorization(result, leftover)
    return result


def prime_divisors(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> list[int]:
    return factor(n, bound).primes


def is_rational_square(x: RationalLike) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    a, b = x.numerator, x.denominator
    return math.isqrt(a) ** 2 == a and math.isqrt(b) ** 2 == b
