from fractions import Fraction

import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ioalg.exactnum import (CycloNumber, CycloParseError, IncompatibleOrderError,
                            OrderInsufficientError, cyclotomic_poly, euler_phi, field_eq,
                            format_cyclo, parse_cyclo, phase, root_of_unity)


def to_complex(c: CycloNumber) -> complex:
    z = cmath.exp(2j * cmath.pi / c.order)
    return sum(float(a) * z ** k for k, a in enumerate(c.coeffs))


def test_small_identities():
    z4 = root_of_unity(1, 4)
    assert z4 * z4 == -1
    z8 = root_of_unity(1, 8)
    assert z8 * root_of_unity(7, 8) == 1
    z6 = root_of_unity(1, 6)
    assert z6 * z6 == z6 - 1
    assert z4.inverse() == root_of_unity(3, 4)
    half = CycloNumber.rational(Fraction(1, 2), 5)
    assert half + Fraction(1, 3) == CycloNumber.rational(Fraction(5, 6), 5)


def test_cyclotomic_polynomials_against_sympy():
    import sympy

    x = sympy.Symbol("x")
    for n in range(1, 31):
        want = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]
        assert list(cyclotomic_poly(n)) == [int(c) for c in want]
        assert euler_phi(n) == int(sympy.totient(n))


def test_mismatched_orders_rejected():
    with pytest.raises(IncompatibleOrderError):
        root_of_unity(1, 4) + root_of_unity(1, 3)
    with pytest.raises(IncompatibleOrderError):
        field_eq(root_of_unity(1, 4), root_of_unity(1, 8))
    with pytest.raises(IncompatibleOrderError):
        root_of_unity(1, 3, 8)


def test_phase():
    assert phase(Fraction(1, 2), 4) == root_of_unity(1, 4)
    assert phase(Fraction(-1, 2), 4) == -root_of_unity(1, 4)
    assert phase(1, 2) == -1
    assert phase(Fraction(1, 3), 3) == -root_of_unity(2, 3)
    with pytest.raises(OrderInsufficientError):
        phase(Fraction(1, 4), 4)


def test_embedding_preserves_value():
    z = root_of_unity(1, 4)
    assert z.embed(8) == root_of_unity(2, 8)
    assert z.embed(12) == root_of_unity(3, 12)


def test_text_round_trip():
    for text in ("z(2,8)", "1/2", "-z(1,3) + 2*z(2,3)", "(1 + z(1,5))*(1 - z(1,5))"):
        c = parse_cyclo(text)
        assert parse_cyclo(format_cyclo(c), c.order) == c
    with pytest.raises(CycloParseError):
        parse_cyclo("z(1,)")
    with pytest.raises(CycloParseError):
        parse_cyclo("")


orders = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12, 15, 24])


@st.composite
def cyclos(draw, order=None):
    n = order if order is not None else draw(orders)
    d = euler_phi(n)
    cs = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7),
                       min_size=d, max_size=d))
    return CycloNumber(n, cs)


@st.composite
def triples(draw):
    n = draw(orders)
    return draw(cyclos(n)), draw(cyclos(n)), draw(cyclos(n))


@settings(max_examples=60, deadline=None)
@given(triples())
def test_field_axioms(t):
    a, b, c = t
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if a:
        assert a * a.inverse() == 1


@settings(max_examples=60, deadline=None)
@given(triples())
def test_complex_embedding_is_a_homomorphism(t):
    a, b, _ = t
    assert abs(to_complex(a * b) - to_complex(a) * to_complex(b)) < 1e-6
    assert abs(to_complex(a + b) - to_complex(a) - to_complex(b)) < 1e-6


@settings(max_examples=40, deadline=None)
@given(cyclos())
def test_format_parse_round_trip(c):
    assert parse_cyclo(format_cyclo(c), c.order) == c
