"""Critical-orbit arithmetic for cubics in the normal form A z^3 + B z + c.

The critical points are +-gamma with gamma^2 = -B/(3A). Nothing here ever
takes that square root: the iterate f^n(gamma) is carried as the pair
(F_n, G_n) with f^n(gamma) = F_n * gamma + G_n, so every quantity stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import RationalLike
from .poly import MPoly, Poly, discriminant

DEFAULT_MAX_ITER = 12
MAX_LOCUS_LEVEL = 5


class DegenerateCriticalPoint(ValueError):
    pass


class NoCollision(ValueError):
    pass


@dataclass(frozen=True)
class CubicParams:
    A: Fraction
    B: Fraction
    c: int = 1

    def __post_init__(self):
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "B", Fraction(self.B))
        if self.A == 0:
            raise ValueError("A must be nonzero")
        if self.c not in (0, 1):
            raise ValueError("constant term must be 0 or 1")

    @property
    def poly(self) -> Poly:
        return Poly((self.c, self.B, 0, self.A))

    def __call__(self, x: RationalLike) -> Fraction:
        x = Fraction(x)
        return self.A * x**3 + self.B * x + self.c

    @property
    def gamma_squared(self) -> Fraction:
        return -self.B / (3 * self.A)


@dataclass(frozen=True)
class OrbitData:
    n: int
    F: tuple[Fraction, ...]
    G: tuple[Fraction, ...]
    H: tuple[Fraction, ...]  # H[k] for k = 0..n; H[0] = B/(3A) is unused
    C: tuple[Fraction, ...]  # likewise C[0] unused

    def collided(self, k: int) -> bool:
        return self.F[k] == 0


def normalize(a3: RationalLike, a2: RationalLike, a1: RationalLike, a0: RationalLike):
    """Conjugate a3 z^3 + a2 z^2 + a1 z + a0 into A z^3 + B z + c.

    Returns ``(params, (scale, shift))`` where phi(z) = scale*z + shift
    satisfies phi^{-1} o f o phi = A z^3 + B z + c.
    """
    a3, a2, a1, a0 = map(Fraction, (a3, a2, a1, a0))
    if a3 == 0:
        raise ValueError("leading coefficient must be nonzero")
    f = Poly((a0, a1, a2, a3))
    shift = -a2 / (3 * a3)
    moved = f(Poly((shift, 1))) - shift  # conjugate by z -> z + shift
    assert moved[2] == 0
    b1, b0 = moved[1], moved[0]
    if b0 == 0:
        return CubicParams(a3, b1, 0), (Fraction(1), shift)
    return CubicParams(a3 * b0**2, b1, 1), (b0, shift)


def orbit(params: CubicParams, n: int) -> OrbitData:
    if n < 0:
        raise ValueError("orbit length must be non-negative")
    A, B, c = params.A, params.B, params.c
    F, G = [Fraction(1)], [Fraction(0)]
    for _ in range(n):
        f_prev, g_prev = F[-1], G[-1]
        F.append((3 * A * g_prev**2 + B - B / 3 * f_prev**2) * f_prev)
        G.append(A * g_prev**3 + B * g_prev + c - B * f_prev**2 * g_prev)
    ratio = B / (3 * A)
    H = tuple(ratio * fk**2 + gk**2 for fk, gk in zip(F, G))
    C = tuple(-4 * ratio * fk**2 for fk in F)
    return OrbitData(n, tuple(F), tuple(G), H, C)


def _require_collision_family(params: CubicParams) -> None:
    if params.B == 0:
        raise DegenerateCriticalPoint("B = 0: the critical point is degenerate")
    if params.c == 0:
        raise DegenerateCriticalPoint(
            "the odd family A z^3 + B z cannot have a collision off the fixed point 0"
        )


def collision_index(params: CubicParams, max_iter: int = DEFAULT_MAX_ITER) -> Optional[int]:
    """Smallest l with F_l = 0 (and F_{l-1} != 0), or None within max_iter."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    _require_collision_family(params)
    A, B, c = params.A, params.B, params.c
    f, g = Fraction(1), Fraction(0)
    # same recursion as orbit(), stopping at the first zero: heights triple per step
    for k in range(1, max_iter + 1):
        f, g = (3 * A * g**2 + B - B / 3 * f**2) * f, A * g**3 + B * g + c - B * f**2 * g
        if f == 0:
            assert k >= 2, "F_1 = 2B/3 vanished with B != 0"
            return k
    return None


def require_collision(params: CubicParams, ell: int) -> OrbitData:
    _require_collision_family(params)
    if ell < 2:
        raise NoCollision("collision level must be >= 2")
    data = orbit(params, ell)
    if data.F[ell] != 0 or data.F[ell - 1] == 0:
        raise NoCollision(f"critical points do not collide at iterate {ell}")
    return data


def symbolic_orbit(n: int) -> tuple[list[MPoly], list[MPoly]]:
    """F_0..F_n and G_0..G_n as polynomials in A, B (with c = 1)."""
    vs = ("A", "B")
    A, B = MPoly.var(vs, "A"), MPoly.var(vs, "B")
    F, G = [MPoly.const(vs, 1)], [MPoly.const(vs, 0)]
    third = Fraction(1, 3)
    for _ in range(n):
        f_prev, g_prev = F[-1], G[-1]
        f_sq = f_prev * f_prev
        g_sq = g_prev * g_prev
        F.append((3 * A * g_sq + B - third * B * f_sq) * f_prev)
        G.append(A * g_sq * g_prev + B * g_prev + 1 - B * f_sq * g_prev)
    return F, G


def collision_locus(ell: int) -> MPoly:
    """F_ell(A, B): its zero set (off F_{ell-1} = 0) is the level-ell collision locus."""
    if not 2 <= ell <= MAX_LOCUS_LEVEL:
        raise ValueError(f"collision locus supported for 2 <= ell <= {MAX_LOCUS_LEVEL}")
    F, _ = symbolic_orbit(ell)
    return F[ell]


def e_values(params: CubicParams, data: OrbitData, x0: RationalLike, n: int):
    """(E_n(x0), tilde E_n(x0)); the second is None unless F_n = 0."""
    if not 0 <= n <= data.n:
        raise ValueError("level outside the computed orbit")
    x0 = Fraction(x0)
    e = data.H[n] - 2 * data.G[n] * x0 + x0**2
    tilde = data.G[n] - x0 if data.F[n] == 0 else None
    return e, tilde


def e_poly(data: OrbitData, n: int) -> Poly:
    """E_n(t) = t^2 - 2 G_n t + H_n."""
    return Poly((data.H[n], -2 * data.G[n], 1))


def disc_tower(params: CubicParams, x0: RationalLike, n: int) -> list[Fraction]:
    """[disc(f^k - x0) for k = 0..n] from the critical-orbit recursion."""
    if n < 0:
        raise ValueError("n must be non-negative")
    data = orbit(params, n)
    A = params.A
    tower = [Fraction(1)]
    for k in range(1, n + 1):
        e_k, _ = e_values(params, data, x0, k)
        tower.append(-(3 ** (3**k)) * A ** (3 ** (2 * k - 1) - 1) * tower[-1] ** 3 * e_k)
    return tower


def direct_discriminant(params: CubicParams, x0: RationalLike, k: int) -> Fraction:
    from .poly import iterate

    return discriminant(iterate(params.poly, k) - Fraction(x0))


def d_ell(params: CubicParams, x0: RationalLike, ell: int) -> Fraction:
    """The rational D with disc(f^ell - x0) * disc(f^{ell-1} - x0) = -3 D^2."""
    data = require_collision(params, ell)
    num3, num_a = 3**ell - 1, 3 ** (2 * ell - 1) - 1
    assert num3 % 2 == 0 and num_a % 2 == 0
    prev = disc_tower(params, x0, ell - 1)[-1]
    return 3 ** (num3 // 2) * params.A ** (num_a // 2) * prev**2 * (data.G[ell] - Fraction(x0))


@dataclass(frozen=True)
class ResolventData:
    s1: Fraction
    s2: Fraction
    s3: Fraction
    quartic: Poly
    identity_value: Fraction

    @property
    def cubic(self) -> Poly:
        """z^3 - s1 z^2 + s2 z - s3."""
        return Poly((-self.s3, self.s2, -self.s1, 1))


def resolvent(params: CubicParams, x0: RationalLike, ell: int) -> ResolventData:
    data = require_collision(params, ell)
    A, B = params.A, params.B
    g = data.G[ell - 1]
    tilde = data.G[ell] - Fraction(x0)
    s1 = B / A + 12 * g**2
    s2 = -6 / A * g * tilde
    s3 = tilde**2 / A**2
    disc_like = s2**2 - 4 * s1 * s3
    quartic = Poly((disc_like, -8 * s3, -2 * s2, 0, 1))
    expected = -4 * B / (3 * A**3) * data.F[ell - 1] ** 2 * tilde**2
    if disc_like != expected:
        raise ArithmeticError("resolvent identity failed; orbit data is inconsistent")
    return ResolventData(s1, s2, s3, quartic, disc_like)
