from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvq.core.scalars import (
    Poly,
    format_scalar,
    parse_scalar,
    scalar_params,
    specialize,
    to_rational,
)
from bvq.errors import ParseError, UnspecializedParameter, ValidationError

t = Poly.var("t")
hbar = Poly.var("hbar")


def test_parse_rationals():
    assert parse_scalar("3/2") == Fraction(3, 2)
    assert parse_scalar("-4") == -4
    assert parse_scalar(7) == 7
    assert parse_scalar(" 6/4 ") == Fraction(3, 2)


def test_parse_polynomial_in_declared_parameter():
    p = parse_scalar("2*t-1", ["t"])
    assert p == 2 * t - 1
    assert parse_scalar("t^2", ["t"]) == t * t
    assert parse_scalar("-t^2", ["t"]) == -(t * t)
    assert parse_scalar("(t+1)/2", ["t"]) == (t + 1) / 2


def test_parse_rejects_floats_and_division_by_zero():
    with pytest.raises(ParseError):
        parse_scalar("0.5")
    with pytest.raises(ParseError):
        parse_scalar("1/0")
    with pytest.raises(ParseError):
        parse_scalar("")
    with pytest.raises(ParseError):
        parse_scalar("2*")


def test_parse_undeclared_parameter_is_a_validation_error():
    with pytest.raises(ValidationError):
        parse_scalar("s", ["t"])


def test_parse_error_carries_location():
    with pytest.raises(ParseError) as err:
        parse_scalar("1/0", location="pairing[0]")
    assert err.value.location == "pairing[0]"
    assert "pairing[0]" in str(err.value)


def test_poly_collapses_to_rational():
    p = (t + 1) - t
    assert not isinstance(p, Poly) or p.is_constant()
    assert p == 1
    assert t * 0 == 0


def test_specialize_and_to_rational():
    p = 3 * t * hbar + 2
    assert scalar_params(p) == {"t", "hbar"}
    q = specialize(p, {"t": 2})
    assert scalar_params(q) == {"hbar"}
    assert to_rational(specialize(q, {"hbar": Fraction(1, 3)})) == 4
    with pytest.raises(UnspecializedParameter):
        to_rational(q)


@given(st.fractions(max_denominator=50))
def test_format_parse_roundtrip_rational(x):
    assert parse_scalar(format_scalar(x)) == x


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2), st.fractions(max_denominator=9)),
                max_size=5))
def test_format_parse_roundtrip_poly(terms):
    p = Fraction(0)
    for a, b, c in terms:
        p = p + c * t ** a * hbar ** b
    assert parse_scalar(format_scalar(p), ["t", "hbar"]) == p


@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20), st.fractions(max_denominator=20))
def test_poly_evaluation_is_a_ring_map(a, b, v):
    p = a * t + b
    q = b * t * t - a
    assert specialize(p * q, {"t": v}) == specialize(p, {"t": v}) * specialize(q, {"t": v})
    assert specialize(p + q, {"t": v}) == specialize(p, {"t": v}) + specialize(q, {"t": v})
