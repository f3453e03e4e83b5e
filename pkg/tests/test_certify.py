import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arbor_cubic.certify import (
    INCONCLUSIVE,
    QTILDE_FULL,
    Certificate,
    check_h_escape,
    check_level,
    certify,
    certify_function_field,
    find_places,
    find_u,
    poly_valuation,
    recompute_checks,
    sqrt_minus3_in_base,
)
from arbor_cubic.dynamics import CubicParams
from arbor_cubic.poly import Poly

F33 = CubicParams(33, 9)
X0 = Fraction(-31, 5)
SPECIAL = Fraction(-827, 4)


@pytest.fixture(scope="module")
def rational_certificate():
    return certify(F33, X0, 2, 4)


def test_recompute_rules():
    got = recompute_checks({"A": 0, "x0": -1, "C1": 1, "E2_odd": 3, "Et3_odd": None})
    assert got == {"A_unit": True, "x0_integral": False, "C1_unit": False, "E2_odd": True, "Et3_odd": False}
    assert recompute_checks({"x0": None}) == {"x0_integral": True}


def test_sqrt_minus3_not_rational():
    assert not sqrt_minus3_in_base()


def test_reference_places():
    places = find_places(F33, X0, 2, 4)
    assert places[1].passing == [421]
    assert places[2].passing == [229]
    assert places[3].passing == [401, 1521629]
    assert places[4].passing == [43, 347651, 722144241378612874253]
    assert all(p.complete for p in places.values())
    assert find_u(F33, X0) == 5


def test_level_checks_at_reference_primes():
    assert check_level(F33, X0, 2, 1, 421).passed
    assert check_level(F33, X0, 2, 2, 229).passed
    lc = check_level(F33, X0, 2, 2, 7)
    assert lc.failures() == ["Et2_odd"]


def test_special_point_fails_c_condition():
    lc = check_level(F33, SPECIAL, 2, 2, 11)
    assert lc.valuations["C1"] == -1
    assert not lc.checks["C1_unit"]
    assert lc.failures() == ["A_unit", "C1_unit", "E1_unit"]


def test_rational_certificate(rational_certificate):
    cert = rational_certificate
    assert cert.conclusion == f"{QTILDE_FULL}-through-4"
    assert cert.passed and cert.verified_through == 4
    assert cert.u.prime == "5" and cert.u.vx0 == -1
    assert [lc.prime for lc in cert.levels] == ["421", "229", "401", "43"]
    assert "through level 4" in cert.note


def test_certificate_json_round_trip_and_recheck(rational_certificate):
    obj = json.loads(rational_certificate.dumps())
    assert set(obj) == {"A", "B", "x0", "ell", "levels", "u", "conclusion", "note"}
    back = Certificate.from_json_obj(obj)
    assert back.to_json_obj() == rational_certificate.to_json_obj()
    assert back.verified_through == 4
    for lc in back.levels:
        assert recompute_checks(lc.valuations) == lc.checks


def test_certificate_monotone(rational_certificate):
    for N in (1, 2, 3):
        shorter = certify(F33, X0, 2, N)
        assert shorter.conclusion == f"{QTILDE_FULL}-through-{N}"
        assert [lc.to_json_obj() for lc in shorter.levels] == [lc.to_json_obj() for lc in rational_certificate.levels[:N]]


def test_special_certificate_is_inconclusive():
    cert = certify(F33, SPECIAL, 2, 2)
    assert cert.conclusion == INCONCLUSIVE
    assert cert.u.prime == "2"
    assert "11 fails" in cert.note


def test_no_u_place():
    cert = certify(F33, 1, 2, 2)
    assert cert.conclusion == INCONCLUSIVE and cert.note == "no place u"
    assert find_u(F33, Fraction(1, 27)) is None  # valuation divisible by 3


def test_factor_bound_only_limits_composites():
    # the 21-digit cofactor at level 4 is prime, so a small bound still completes
    places = find_places(F33, X0, 2, 4, bound=2**40)
    assert places[4].complete and 722144241378612874253 in places[4].passing


def test_escape_check_reference_point():
    report = check_h_escape(F33, X0, 2, 229)
    assert report.hypotheses_hold
    assert report.polygon.slopes == [Fraction(-1, 2)]
    assert report.single_nonintegral_segment
    assert report.rational_roots == []
    assert report.escapes_h is True


def test_escape_check_special_point_cites_discrepancy():
    report = check_h_escape(F33, SPECIAL, 2, 11)
    assert not report.hypotheses_hold
    assert report.rational_roots == []
    assert report.escapes_h is None
    assert any("discrepancy" in n for n in report.notes)
    assert report.quartic == Poly((Fraction(-729, 11), Fraction(-81, 2), -27, 0, 1))


def test_function_field_certificate():
    cert = certify_function_field(F33, 2, 4)
    assert cert.conclusion == f"{QTILDE_FULL}-through-4"
    assert cert.levels[0].prime == "t^2 - 2*t + 47/11"
    assert cert.u.prime == "1/t"


def test_function_field_preperiodic_orbit():
    cert = certify_function_field(CubicParams(Fraction(3, 16), Fraction(-9, 4)), 2, 4)
    assert cert.conclusion == INCONCLUSIVE
    assert "preperiodic" in cert.note


@given(st.integers(0, 5), st.fractions(min_value=-9, max_value=9).filter(lambda x: x != 0))
def test_poly_valuation(k, c):
    place = Poly((-3, 0, 1))
    assert poly_valuation(place, c * place**k * Poly((1, 1))) == k
    assert poly_valuation(place, 0) is None
