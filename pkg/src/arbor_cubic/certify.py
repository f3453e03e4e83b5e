"""Valuation certificates for the full arboreal Galois group.

Everything here is finite: a certificate says which places were found and
checked through level N, never anything about all levels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .arith import (
    DEFAULT_FACTOR_BOUND,
    IncompleteFactorization,
    RationalLike,
    factor,
    format_rational,
    is_rational_square,
    val,
)
from .dynamics import CubicParams, OrbitData, e_values, require_collision, resolvent
from .poly import NewtonPolygon, Poly, format_poly, iterate, newton_polygon, rational_roots

QTILDE_FULL = "QTILDE_FULL"
Q_FULL = "Q_FULL"
INCONCLUSIVE = "INCONCLUSIVE"

Valuation = Callable[[Fraction], int]


def sqrt_minus3_in_base() -> bool:
    """Whether -3 is a square in the base field; over the rationals it never is."""
    return is_rational_square(Fraction(-3))


# -- per-level hypotheses -------------------------------------------------------

@dataclass
class LevelCheck:
    n: int
    prime: str
    checks: dict[str, bool]
    valuations: dict[str, Optional[int]]  # None stands for the valuation of zero

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]

    def to_json_obj(self) -> dict:
        return {"n": self.n, "prime": self.prime, "checks": dict(self.checks), "valuations": dict(self.valuations)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LevelCheck":
        return cls(int(obj["n"]), str(obj["prime"]), dict(obj["checks"]), dict(obj["valuations"]))


def recompute_checks(valuations: dict[str, Optional[int]]) -> dict[str, bool]:
    """Rebuild every boolean from the stored valuations; names carry the rule."""
    out = {}
    for name, v in valuations.items():
        if name == "x0":
            out["x0_integral"] = v is None or v >= 0
        elif name.endswith("_odd"):
            out[name] = v is not None and v % 2 == 1
        else:
            out[name + "_unit"] = v == 0
    return out


def _level_valuations(
    params: CubicParams, data: OrbitData, x0: Fraction, ell: int, n: int, v: Valuation
) -> dict[str, Optional[int]]:
    def safe(x: Fraction) -> Optional[int]:
        return None if x == 0 else v(x)

    vals: dict[str, Optional[int]] = {
        "A": safe(params.A),
        "B": safe(params.B),
        "six": safe(Fraction(6)),
        "x0": safe(x0),
    }
    for j in range(1, min(ell - 1, n) + 1):
        vals[f"C{j}"] = safe(data.C[j])
    for i in range(1, n):
        e, _ = e_values(params, data, x0, i)
        vals[f"E{i}"] = safe(e)
    e, tilde = e_values(params, data, x0, n)
    if n < ell:
        vals[f"E{n}_odd"] = safe(e)
    else:
        vals[f"Et{n}_odd"] = safe(tilde)
    return vals


def check_level(params: CubicParams, x0: RationalLike, ell: int, n: int, v: int) -> LevelCheck:
    """The per-level valuation hypotheses at the prime v."""
    if n < 1:
        raise ValueError("level must be >= 1")
    data = require_collision(params, ell)
    if n > ell:
        from .dynamics import orbit

        data = orbit(params, n)
    x0 = Fraction(x0)
    vals = _level_valuations(params, data, x0, ell, n, lambda x: val(v, x))
    return LevelCheck(n, str(v), recompute_checks(vals), vals)


def level_value(params: CubicParams, data: OrbitData, x0: Fraction, ell: int, n: int) -> Fraction:
    """E_n(x0) below the collision level, tilde E_n(x0) from it on."""
    e, tilde = e_values(params, data, x0, n)
    return e if n < ell else tilde


# -- place search -----------------------------------------------------------------

@dataclass
class LevelPlaces:
    n: int
    value: Fraction
    candidates: list[int]
    passing: list[int]
    complete: bool = True
    cofactor: Optional[int] = None


def find_places(
    params: CubicParams,
    x0: RationalLike,
    ell: int,
    N: int,
    bound: int = DEFAULT_FACTOR_BOUND,
    progress: Optional[Callable[[str], None]] = None,
) -> dict[int, LevelPlaces]:
    """For each level, primes of the numerator at which the level hypotheses hold.

    Primes that already passed at a lower level are skipped so that the chosen
    places are pairwise distinct.
    """
    require_collision(params, ell)
    if N < 1:
        return {}
    from .dynamics import orbit

    x0 = Fraction(x0)
    data = orbit(params, max(N, ell))
    used: set[int] = set()
    out: dict[int, LevelPlaces] = {}
    for n in range(1, N + 1):
        value = level_value(params, data, x0, ell, n)
        if value == 0:
            out[n] = LevelPlaces(n, value, [], [])
            continue
        if progress:
            progress(f"level {n}: factoring {abs(value.numerator).bit_length()}-bit numerator")
        complete, cofactor = True, None
        try:
            primes = factor(value.numerator, bound).primes
        except IncompleteFactorization as exc:
            primes = exc.partial.primes
            complete, cofactor = False, exc.cofactor
        passing = []
        for p in primes:
            if p in used:
                continue
            if check_level(params, x0, ell, n, p).passed:
                passing.append(p)
        used.update(passing)
        out[n] = LevelPlaces(n, value, primes, passing, complete, cofactor)
    return out


def find_u(params: CubicParams, x0: RationalLike, bound: int = DEFAULT_FACTOR_BOUND) -> Optional[int]:
    """Smallest prime u with u(A) = 0 <= u(B) and u(x0) negative and prime to 3."""
    x0 = Fraction(x0)
    if x0.denominator == 1:
        return None
    for p in factor(x0.denominator, bound).primes:
        if val(p, params.A) != 0:
            continue
        if params.B != 0 and val(p, params.B) < 0:
            continue
        if val(p, x0) % 3 != 0:
            return p
    return None


# -- escaping the H subgroups ---------------------------------------------------------

EXAMPLE_QUARTIC_DISCREPANCY = (
    "the quartic printed for (A, B, x0) = (33, 9, -827/4) has root 18, but the quartic built from "
    "the resolvent values is z^4 - 27 z^2 - 81/2 z - 729/11 with no rational root; the printed "
    "tilde E_2 = 3^4*11/2^2 should be -3^3*11/2^2 and the printed z and constant coefficients "
    "carry an extra factor 11^2"
)


@dataclass
class EscapeReport:
    prime: int
    checks: dict[str, bool]
    valuations: dict[str, Optional[int]]
    quartic: Poly
    polygon: Optional[NewtonPolygon]
    single_nonintegral_segment: Optional[bool]
    rational_roots: list[Fraction]
    notes: list[str] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.checks.values())

    @property
    def escapes_h(self) -> Optional[bool]:
        """True when the hypotheses hold; False when a rational root pins the group inside an H."""
        if self.rational_roots:
            return False
        if self.hypotheses_hold:
            return True
        return None

    def to_json_obj(self) -> dict:
        return {
            "prime": str(self.prime),
            "checks": self.checks,
            "valuations": self.valuations,
            "quartic": format_poly(self.quartic),
            "polygon_slopes": None if self.polygon is None else [format_rational(s) for s in self.polygon.slopes],
            "single_nonintegral_segment": self.single_nonintegral_segment,
            "rational_roots": [format_rational(r) for r in self.rational_roots],
            "escapes_h": self.escapes_h,
            "notes": self.notes,
        }


def check_h_escape(params: CubicParams, x0: RationalLike, ell: int, v: int) -> EscapeReport:
    """Hypotheses for the top-level kernel to escape every H variant, plus the quartic diagnostics."""
    data = require_collision(params, ell)
    x0 = Fraction(x0)

    def safe(x: Fraction) -> Optional[int]:
        return None if x == 0 else val(v, x)

    vals: dict[str, Optional[int]] = {
        "A": safe(params.A),
        "B": safe(params.B),
        f"C{ell - 1}": safe(data.C[ell - 1]),
        "six": safe(Fraction(6)),
        "x0": safe(x0),
    }
    for i in range(1, ell):
        vals[f"E{i}"] = safe(e_values(params, data, x0, i)[0])
    vals[f"Et{ell}_odd"] = safe(e_values(params, data, x0, ell)[1])
    checks = recompute_checks(vals)

    res = resolvent(params, x0, ell)
    quartic = res.quartic
    polygon = None
    single = None
    if quartic[0] != 0:
        polygon = newton_polygon(quartic, v)
        single = len(polygon.hull) == 1 and polygon.hull[0].slope.denominator != 1
    roots = rational_roots(quartic)
    notes = []
    if roots:
        notes.append("the quartic has a rational root, so the level-ell group sits inside an H variant")
    if (params.A, params.B, x0, ell) == (33, 9, Fraction(-827, 4), 2):
        notes.append("known discrepancy: " + EXAMPLE_QUARTIC_DISCREPANCY)
    return EscapeReport(v, checks, vals, quartic, polygon, single, roots, notes)


# -- certificates --------------------------------------------------------------------

@dataclass
class UPlace:
    prime: str
    vx0: int
    checks: dict[str, bool] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {"prime": self.prime, "vx0": self.vx0}


@dataclass
class Certificate:
    A: Fraction
    B: Fraction
    x0: str
    ell: int
    levels: list[LevelCheck]
    u: Optional[UPlace]
    conclusion: str
    note: str
    verified_through: int = 0

    @property
    def kind(self) -> str:
        return self.conclusion.split("-", 1)[0]

    @property
    def passed(self) -> bool:
        return self.kind in (QTILDE_FULL, Q_FULL)

    def to_json_obj(self) -> dict:
        return {
            "A": format_rational(self.A),
            "B": format_rational(self.B),
            "x0": self.x0,
            "ell": self.ell,
            "levels": [lc.to_json_obj() for lc in self.levels],
            "u": None if self.u is None else self.u.to_json_obj(),
            "conclusion": self.conclusion,
            "note": self.note,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Certificate":
        levels = [LevelCheck.from_json_obj(x) for x in obj["levels"]]
        u = None if obj["u"] is None else UPlace(obj["u"]["prime"], int(obj["u"]["vx0"]))
        conclusion = obj["conclusion"]
        through = int(conclusion.rsplit("-", 1)[1]) if conclusion.startswith(QTILDE_FULL) or conclusion.startswith(Q_FULL) else 0
        return cls(
            Fraction(obj["A"]), Fraction(obj["B"]), obj["x0"], int(obj["ell"]), levels, u, conclusion, obj["note"], through
        )


def _full_label(N: int) -> str:
    return f"{Q_FULL if sqrt_minus3_in_base() else QTILDE_FULL}-through-{N}"


def _bounded_note(N: int) -> str:
    return f"verified through level {N}; the full statement needs suitable places at every level"


def _u_polygons(params: CubicParams, x0: Fraction, u: int, depth: int) -> dict[str, bool]:
    """f^j - x0 should have a single Newton segment whose root valuation has denominator 3^j."""
    out = {}
    g = params.poly
    for j in range(1, depth + 1):
        poly = iterate(g, j) - x0
        polygon = newton_polygon(poly, u)
        ok = len(polygon.hull) == 1 and polygon.hull[0].slope.denominator == 3**j
        out[f"totally_ramified_f{j}"] = ok
    return out


def certify(
    params: CubicParams,
    x0: RationalLike,
    ell: int,
    N: int,
    bound: int = DEFAULT_FACTOR_BOUND,
    progress: Optional[Callable[[str], None]] = None,
) -> Certificate:
    require_collision(params, ell)
    if N < 1:
        raise ValueError("need at least one level")
    x0 = Fraction(x0)
    x0_text = format_rational(x0)

    u_prime = find_u(params, x0, bound)
    if u_prime is None:
        return Certificate(params.A, params.B, x0_text, ell, [], None, INCONCLUSIVE, "no place u", 0)
    u = UPlace(str(u_prime), val(u_prime, x0))
    u.checks = {"A_unit": val(u_prime, params.A) == 0, "B_integral": val(u_prime, params.B) >= 0}
    u.checks["x0_negative_prime_to_3"] = u.vx0 < 0 and u.vx0 % 3 != 0
    u.checks.update(_u_polygons(params, x0, u_prime, min(N, 3)))
    if not all(u.checks.values()):
        bad = ", ".join(k for k, ok in u.checks.items() if not ok)
        return Certificate(params.A, params.B, x0_text, ell, [], u, INCONCLUSIVE, f"place u={u_prime} fails {bad}", 0)

    places = find_places(params, x0, ell, N, bound, progress)
    levels: list[LevelCheck] = []
    for n in range(1, N + 1):
        found = places[n]
        if found.passing:
            levels.append(check_level(params, x0, ell, n, found.passing[0]))
            continue
        reasons = []
        for p in found.candidates:
            lc = check_level(params, x0, ell, n, p)
            levels.append(lc)
            reasons.append(f"{p} fails {', '.join(lc.failures()) or 'distinctness'}")
        if not found.complete:
            reasons.append(f"unfactored cofactor {found.cofactor}")
        if found.value == 0:
            reasons.append("the level value vanishes")
        detail = "; ".join(reasons) if reasons else "numerator has no prime factors"
        note = f"level {n}: no suitable place ({detail}); " + _bounded_note(n - 1)
        return Certificate(params.A, params.B, x0_text, ell, levels, u, INCONCLUSIVE, note, n - 1)
    return Certificate(params.A, params.B, x0_text, ell, levels, u, _full_label(N), _bounded_note(N), N)


# -- the x0 = t function field ---------------------------------------------------------

def poly_valuation(place: Poly, x: Union[Poly, Fraction, int]) -> Optional[int]:
    """Order of vanishing along an irreducible monic place; None for zero."""
    if not isinstance(x, Poly):
        x = Poly((Fraction(x),))
    if x.is_zero():
        return None
    k = 0
    while True:
        q, r = x.divmod(place)
        if not r.is_zero():
            return k
        x, k = q, k + 1


def _quadratic_place(q: Poly) -> tuple[Poly, bool]:
    """A monic irreducible factor of a monic quadratic and whether q itself is irreducible."""
    b, c = q[1], q[0]
    disc = b * b - 4 * c
    if not is_rational_square(disc):
        return q.monic(), True
    num, den = disc.numerator, disc.denominator
    from math import isqrt

    root = (-b + Fraction(isqrt(num), isqrt(den))) / 2
    return Poly((-root, 1)), False


def orbit_values_distinct(values: list[Fraction]) -> bool:
    return len(set(values)) == len(values)


def certify_function_field(params: CubicParams, ell: int, N: int) -> Certificate:
    """Certificate for x0 = t over k(t), places given by polynomials in t."""
    data0 = require_collision(params, ell)
    if N < 1:
        raise ValueError("need at least one level")
    from .dynamics import e_poly, orbit

    data = orbit(params, max(N, ell)) if N > ell else data0
    t = Poly((0, 1))
    places: list[Poly] = []
    levels: list[LevelCheck] = []
    note_extra = []
    for n in range(1, N + 1):
        if n < ell:
            place, irreducible = _quadratic_place(e_poly(data, n))
            if not irreducible:
                note_extra.append(f"E_{n}(t) splits; using the factor {format_poly(place, 't')}")
        else:
            place = Poly((-data.G[n], 1))
        if place in places:
            levels.append(LevelCheck(n, format_poly(place, "t"), {"distinct_place": False}, {}))
            note = f"preperiodic orbit: the level-{n} place repeats an earlier one; " + _bounded_note(n - 1)
            return Certificate(params.A, params.B, "t", ell, levels, UPlace("1/t", -1), INCONCLUSIVE, note, n - 1)
        places.append(place)

        def v(x, place=place):
            return poly_valuation(place, x)

        vals: dict[str, Optional[int]] = {"A": v(params.A), "B": v(params.B), "six": v(6), "x0": v(t)}
        for j in range(1, min(ell - 1, n) + 1):
            vals[f"C{j}"] = v(data.C[j])
        for i in range(1, n):
            vals[f"E{i}"] = v(e_poly(data, i))
        if n < ell:
            vals[f"E{n}_odd"] = v(e_poly(data, n))
        else:
            vals[f"Et{n}_odd"] = v(Poly((data.G[n], -1)))
        lc = LevelCheck(n, format_poly(place, "t"), recompute_checks(vals), vals)
        levels.append(lc)
        if not lc.passed:
            note = f"level {n}: place {lc.prime} fails {', '.join(lc.failures())}; " + _bounded_note(n - 1)
            return Certificate(params.A, params.B, "t", ell, levels, UPlace("1/t", -1), INCONCLUSIVE, note, n - 1)
    note = _bounded_note(N) + "; u is the negative-degree valuation with u(t) = -1"
    if note_extra:
        note += "; " + "; ".join(note_extra)
    return Certificate(params.A, params.B, "t", ell, levels, UPlace("1/t", -1), _full_label(N), note, N)
