from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from arbor_cubic.dynamics import (
    CubicParams,
    DegenerateCriticalPoint,
    NoCollision,
    collision_index,
    collision_locus,
    d_ell,
    direct_discriminant,
    disc_tower,
    e_poly,
    e_values,
    normalize,
    orbit,
    require_collision,
    resolvent,
    symbolic_orbit,
)
from arbor_cubic.poly import Poly, elementary_symmetric, iterate, mv_eval, poly_from_roots, resultant

small_q = st.fractions(min_value=-12, max_value=12, max_denominator=9)
nonzero_q = small_q.filter(lambda x: x != 0)
F33 = CubicParams(33, 9)


def on_level_two_locus(B):
    """A on the F_2 = 0 curve for a given B."""
    return Fraction(4, 81) * B**3 - B / 3


level_two = nonzero_q.map(lambda B: (on_level_two_locus(B), B)).filter(lambda ab: ab[0] != 0).map(lambda ab: CubicParams(*ab))


def test_reference_orbit():
    data = orbit(F33, 4)
    assert data.F[1] == 6 and data.F[2] == 0
    assert data.G[1:] == (1, -281, -732207881, -12954395051231033048301572681)
    assert data.C[1] == Fraction(-144, 11)
    assert e_poly(data, 1) == Poly((Fraction(47, 11), -2, 1))
    assert collision_index(F33) == 2


@given(small_q, nonzero_q, st.integers(0, 4))
def test_orbit_tracks_critical_point(A, B, n):
    # f^n(gamma) = F_n gamma + G_n, checked in Q(gamma) as pairs
    assume(A != 0)
    params = CubicParams(A, B)
    g2 = params.gamma_squared
    a, b = Fraction(1), Fraction(0)  # a*gamma + b
    for _ in range(n):
        # cube of (a gamma + b) reduced by gamma^2 = g2
        cube_a = a**3 * g2 + 3 * a * b * b
        cube_b = 3 * a * a * b * g2 + b**3
        a, b = A * cube_a + B * a, A * cube_b + B * b + 1
    data = orbit(params, n)
    assert (data.F[n], data.G[n]) == (a, b)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_symbolic_orbit_matches_numeric(n):
    F, G = symbolic_orbit(n)
    for A, B in [(33, 9), (Fraction(-2, 7), 5), (1, -1), (Fraction(3, 16), Fraction(-9, 4))]:
        data = orbit(CubicParams(A, B), n)
        for k in range(n + 1):
            assert mv_eval(F[k], {"A": A, "B": B}) == data.F[k]
            assert mv_eval(G[k], {"A": A, "B": B}) == data.G[k]


@given(level_two)
def test_level_two_locus_collides(params):
    assert mv_eval(collision_locus(2), {"A": params.A, "B": params.B}) == 0
    assert collision_index(params) == 2


def test_degenerate_and_missing_collision():
    with pytest.raises(DegenerateCriticalPoint):
        collision_index(CubicParams(1, 0))
    with pytest.raises(DegenerateCriticalPoint):
        collision_index(CubicParams(1, 3, c=0))
    assert collision_index(CubicParams(1, 1)) is None
    with pytest.raises(NoCollision):
        require_collision(CubicParams(1, 1), 2)


def test_normalize_conjugates():
    params, (scale, shift) = normalize(2, 3, -1, 5)
    f = Poly((5, -1, 3, 2))
    phi = Poly((shift, scale))
    assert f.compose(phi) == phi.compose(params.poly)


@given(small_q, nonzero_q, small_q, st.integers(1, 2))
def test_disc_tower_matches_direct(A, B, x0, k):
    assume(A != 0)
    params = CubicParams(A, B)
    assert disc_tower(params, x0, k)[k] == direct_discriminant(params, x0, k)


def test_disc_tower_level_three_reference_map():
    assert disc_tower(F33, Fraction(-31, 5), 3)[3] == direct_discriminant(F33, Fraction(-31, 5), 3)


@given(level_two, small_q)
def test_d_ell_relation(params, x0):
    d = d_ell(params, x0, 2)
    tower = disc_tower(params, x0, 2)
    assert tower[2] * tower[1] == -3 * d * d


@given(level_two, small_q, st.lists(small_q, min_size=5, max_size=5, unique=True))
def test_root_product_matches_resultant(params, x0, zs):
    # Res_x(f(x) - x0, z - E_1(x)) = A^2 * prod (z - E_1(alpha_i))
    data = orbit(params, 2)
    cubic = resolvent(params, x0, 2).cubic
    g = params.poly - x0
    e1 = e_poly(data, 1)
    for z in zs:
        assert resultant(g, z - e1) == params.A**2 * cubic(z)


@given(level_two, small_q)
def test_e_values_collision_identity(params, x0):
    data = orbit(params, 2)
    e, tilde = e_values(params, data, x0, 2)
    assert tilde is not None
    assert e == tilde**2  # F_2 = 0 collapses E_2 to a square


@given(st.lists(small_q, min_size=3, max_size=3))
def test_quartic_symmetric_functions(deltas):
    d1, d2, d3 = deltas
    thetas = [
        d1 * d2 + d1 * d3 + d2 * d3,
        d1 * d2 - d1 * d3 - d2 * d3,
        -d1 * d2 + d1 * d3 - d2 * d3,
        -d1 * d2 - d1 * d3 + d2 * d3,
    ]
    _, s1, s2, s3 = elementary_symmetric([d * d for d in deltas])
    e = elementary_symmetric(thetas)
    assert e[1] == 0
    assert e[2] == -2 * s2
    assert e[3] == 8 * s3
    assert e[4] == s2**2 - 4 * s1 * s3
    assert poly_from_roots(thetas) == Poly((s2**2 - 4 * s1 * s3, -8 * s3, -2 * s2, 0, 1))


@given(level_two, small_q)
def test_resolvent_discriminant_identity(params, x0):
    data = orbit(params, 2)
    r = resolvent(params, x0, 2)
    _, tilde = e_values(params, data, x0, 2)
    expected = -4 * params.B / (3 * params.A**3) * data.F[1] ** 2 * tilde**2
    assert r.s2**2 - 4 * r.s1 * r.s3 == expected == r.identity_value


def test_special_example_values():
    x0 = Fraction(-827, 4)
    data = orbit(F33, 2)
    e1, _ = e_values(F33, data, x0, 1)
    assert e1 == Fraction(81 * 93787, 2**4 * 11)
    _, tilde = e_values(F33, data, x0, 2)
    assert tilde == Fraction(-297, 4) == -33 * Fraction(3, 2) ** 2
    assert resolvent(F33, x0, 2).quartic == Poly((Fraction(-729, 11), Fraction(-81, 2), -27, 0, 1))
