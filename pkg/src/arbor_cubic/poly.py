"""Exact polynomials over the rationals.

``Poly`` is dense and univariate; ``MPoly`` is sparse and multivariate and
only supports what the symbolic critical-orbit recursion needs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .arith import RationalLike, factor, format_rational, val


def _trim(coeffs: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class Poly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``z**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        self.coeffs = _trim(coeffs)

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: RationalLike) -> "Poly":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    @staticmethod
    def _coerce(other) -> "Poly":
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other) -> "Poly":
        other = Poly._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-Poly._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return Poly._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = Poly._coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result, base = Poly.const(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a rational or another Poly."""
        acc = Poly() if isinstance(x, Poly) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        return self(inner)

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quo = [Fraction(0)] * (dq + 1)
        lead = other.lc
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(quo), Poly(rem[: other.degree])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        return Poly(c / self.lc for c in self.coeffs)

    def content_and_primitive(self) -> tuple[Fraction, list[int]]:
        """Write self = c * P with P an integer polynomial of content 1."""
        if self.is_zero():
            raise ValueError("zero polynomial")
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = reduce(math.gcd, ints)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, den), [a // g for a in ints]


# -- text format -----------------------------------------------------------

def format_poly(g: Poly, var: str = "z") -> str:
    if g.is_zero():
        return "0"
    parts: list[str] = []
    for i in range(g.degree, -1, -1):
        c = g[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = format_rational(abs(c))
        if i == 0:
            term = mag
        else:
            mono = var if i == 1 else f"{var}^{i}"
            term = mono if mag == "1" else f"{mag}*{mono}"
        parts.append((sign, term))
    head_sign, head = parts[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)(?:\*)?)?(?:([a-zA-Z])(?:\^(\d+))?)?$")


def parse_poly(text: str, var: str = "z") -> Poly:
    """Parse ``"33*z^3 + 9*z + 1"``-style input (terms separated by +/-)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    tokens = re.findall(r"([+-])([^+-]+)", s)
    if "".join(a + b for a, b in tokens) != s:
        raise ValueError(f"malformed polynomial: {text!r}")
    coeffs: dict[int, Fraction] = {}
    for sign, body in tokens:
        m = _TERM.match(body)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"malformed term {body!r}")
        if m.group(2) is not None and m.group(2) != var:
            raise ValueError(f"unknown variable {m.group(2)!r}")
        c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        k = 0 if m.group(2) is None else int(m.group(3) or 1)
        coeffs[k] = coeffs.get(k, Fraction(0)) + (c if sign == "+" else -c)
    top = max(coeffs)
    return Poly(coeffs.get(i, 0) for i in range(top + 1))


# -- iteration, resultants, discriminants ----------------------------------

def iterate(f: Poly, n: int) -> Poly:
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    g = Poly.z()
    for _ in range(n):
        g = f(g)
    return g


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder lc(b)**(deg a - deg b + 1) * a mod b over the integers."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for j, c in enumerate(b):
            r[shift + j] -= lr * c
        r.pop()
        while r and r[-1] == 0:
            r.pop()
        e -= 1
    if e > 0:
        r = [c * lb**e for c in r]
    return r


def _int_resultant(a: list[int], b: list[int]) -> int:
    """Subresultant PRS resultant of primitive integer polynomials."""
    s = 1
    if len(a) < len(b):
        a, b = b, a
        if (len(a) - 1) % 2 and (len(b) - 1) % 2:
            s = -1
    g = h = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            break
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        r = _int_prem(a, b)
        if not r:
            return 0
        a = b
        divisor = g * h**delta
        b = [Fraction(c) / divisor for c in r]
        assert all(c.denominator == 1 for c in b), "subresultant division not exact"
        b = [int(c) for c in b]
        g = Fraction(a[-1])
        h = h ** (1 - delta) * g**delta
    da = len(a) - 1
    res = Fraction(b[0]) ** da / h ** (da - 1)
    assert res.denominator == 1
    return s * int(res)


def resultant(g: Poly, h: Poly) -> Fraction:
    """Res(g, h) = lc(g)**deg(h) * prod h(alpha) over the roots of g."""
    if g.is_zero() and h.is_zero():
        raise ValueError("resultant of two zero polynomials")
    if g.is_zero() or h.is_zero():
        return Fraction(0)
    if g.degree == 0:
        return g.lc ** h.degree
    if h.degree == 0:
        return h.lc ** g.degree
    cg, pg = g.content_and_primitive()
    ch, ph = h.content_and_primitive()
    return cg ** h.degree * ch ** g.degree * _int_resultant(pg, ph)


def sylvester_resultant(g: Poly, h: Poly) -> Fraction:
    """Resultant as the Sylvester determinant, by Fraction Gaussian elimination."""
    m, n = g.degree, h.degree
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + list(reversed(g.coeffs)) + [Fraction(0)] * (n - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + list(reversed(h.coeffs)) + [Fraction(0)] * (m - 1 - i))
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        for r in range(col + 1, size):
            if rows[r][col]:
                q = rows[r][col] / rows[col][col]
                rows[r] = [x - q * y for x, y in zip(rows[r], rows[col])]
    return det


def discriminant(g: Poly) -> Fraction:
    d = g.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return Fraction(1)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(g, g.derivative()) / g.lc


# -- Newton polygons -------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    run: int
    slope: Fraction
    multiplicity: int


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of (i, v(c_i)).

    A segment of slope s accounts for ``run`` roots of valuation ``-s``.
    """

    points: tuple[tuple[int, int], ...]
    hull: tuple[Segment, ...]

    @property
    def slopes(self) -> list[Fraction]:
        return [s.slope for s in self.hull]

    def root_valuations(self) -> list[tuple[Fraction, int]]:
        return [(-s.slope, s.multiplicity) for s in self.hull]


def lower_hull(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    pts = sorted(points)
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(g: Poly, p: int) -> NewtonPolygon:
    if g.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    points = tuple((i, val(p, c)) for i, c in enumerate(g.coeffs) if c != 0)
    corners = lower_hull(points)
    segs = []
    for (x1, y1), (x2, y2) in zip(corners, corners[1:]):
        segs.append(Segment(x2 - x1, Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygon(points, tuple(segs))


# -- rational roots --------------------------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    divs = [1]
    for p, e in factor(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def rational_roots(g: Poly) -> list[Fraction]:
    """All rational roots, repeated by multiplicity, in increasing order."""
    if g.is_zero():
        raise ValueError("rational roots of the zero polynomial")
    roots: list[Fraction] = []
    k = 0
    while g[k] == 0:
        k += 1
    roots.extend([Fraction(0)] * k)
    work = Poly(g.coeffs[k:])
    if work.degree >= 1:
        _, ints = work.content_and_primitive()
        candidates = {
            Fraction(sgn * a, b)
            for a in _divisors(ints[0])
            for b in _divisors(ints[-1])
            for sgn in (1, -1)
        }
        for r in sorted(candidates):
            lin = Poly((-r, 1))
            while work.degree >= 1 and work(r) == 0:
                roots.append(r)
                work = work // lin
    return sorted(roots)


# -- multivariate ----------------------------------------------------------

Monomial = tuple[int, ...]


class MPoly:
    """Sparse polynomial in named variables; keys are exponent vectors."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Monomial, RationalLike] | None = None):
        self.variables = tuple(variables)
        self.terms: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != len(self.variables):
                raise ValueError("exponent vector length does not match variables")
            c = Fraction(c)
            if c:
                self.terms[tuple(mono)] = c

    @classmethod
    def const(cls, variables: Sequence[str], c: RationalLike) -> "MPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "MPoly":
        mono = tuple(1 if v == name else 0 for v in variables)
        if sum(mono) != 1:
            raise ValueError(f"unknown variable {name!r}")
        return cls(variables, {mono: 1})

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.variables != self.variables:
                raise ValueError("variable lists differ")
            return other
        return MPoly.const(self.variables, other)

    def __add__(self, other) -> "MPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return MPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MPoly":
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        result = MPoly.const(self.variables, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.variables, other)
        return isinstance(other, MPoly) and self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Graded lexicographic order, largest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.sorted_terms():
            factors = [
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, mono) if e
            ]
            mag = format_rational(abs(c))
            body = "*".join(([] if mag == "1" and factors else [mag]) + factors)
            pieces.append(("-" if c < 0 else "+", body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for s, b in pieces[1:]:
            text += f" {s} {b}"
        return text

    __repr__ = __str__


def mv_eval(q: MPoly, assignment: Mapping[str, RationalLike]) -> Fraction:
    missing = [v for v in q.variables if v not in assignment]
    if missing:
        raise KeyError(f"no value for variable(s) {missing}")
    point = [Fraction(assignment[v]) for v in q.variables]
    total = Fraction(0)
    for mono, c in q.terms.items():
        term = c
        for x, e in zip(point, mono):
            if e:
                term *= x**e
        total += term
    return total


def elementary_symmetric(values: Sequence[RationalLike]) -> list[Fraction]:
    """[e_0, e_1, ..., e_n] of the given values."""
    e = [Fraction(1)] + [Fraction(0)] * len(values)
    for x in values:
        for k in range(len(values), 0, -1):
            e[k] += e[k - 1] * x
    return e


def poly_from_roots(roots: Sequence[RationalLike]) -> Poly:
    out = Poly.const(1)
    for r in roots:
        out = out * Poly((-Fraction(r), 1))
    return out


__all__ = [
    "MPoly",
    "NewtonPolygon",
    "Poly",
    "Segment",
    "discriminant",
    "elementary_symmetric",
    "format_poly",
    "iterate",
    "lower_hull",
    "mv_eval",
    "newton_polygon",
    "parse_poly",
    "poly_from_roots",
    "rational_roots",
    "resultant",
    "sylvester_resultant",
]
