from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ioalg.exactnum import CycloNumber
from ioalg.ratfun import (GBasisElement, LaurentRational, NotInSpanError, RatParseError,
                          decompose_in_gbasis, format_rat, iota12, iota20, iota21, parse_rat,
                          rat_equal, reconstruct_from_gbasis)
from ioalg.series import Window, s_mul, series_equal_on

from oracles import delta_derivative, expand12, expand20, expand21

W12 = Window.box(("x1", "x2"), -8, 8)
W02 = Window.box(("x0", "x2"), -8, 8)
ORDER = 24


def test_iota12_simple_pole():
    f = LaurentRational.monomial(0, 0, -1)
    s = iota12(f, W12)
    for m in range(0, 8):
        assert s.coefficient((-1 - m, m)) == 1
    half = iota12(LaurentRational.monomial(Fraction(1, 2), 0, -1), W12)
    assert set(half.terms) == {(Fraction(-1, 2) - m, Fraction(m)) for m in range(0, 8)}


def test_polynomials_expand_to_themselves():
    p = LaurentRational({(2, 0): 1, (1, 1): -3, (0, 2): 5})
    want = {(2, 0): 1, (1, 1): -3, (0, 2): 5}
    assert {tuple(map(int, k)): v for k, v in iota12(p, W12).terms.items()} == want
    assert iota21(p, W12).terms == iota12(p, W12).terms


def test_iota_difference_is_delta():
    f = LaurentRational.monomial(0, 0, -1)
    diff = {k: v for k, v in iota12(f, W12).terms.items()}
    for k, v in iota21(f, W12).terms.items():
        diff[k] = diff.get(k, 0) - v
    diff = {k: v for k, v in diff.items() if v}
    assert diff == {(Fraction(-n - 1), Fraction(n)): 1 for n in range(-9, 9)
                    if -8 <= -n - 1 <= 8 and -8 <= n <= 8}


def test_iota21_double_pole():
    s = iota21(LaurentRational.monomial(0, 0, -2), W12)
    for m in range(0, 7):
        assert s.coefficient((m, -2 - m)) == m + 1


def test_iota20_simple():
    f = LaurentRational.monomial(-1, 0, 0)
    s = iota20(f, W02)
    for m in range(0, 8):
        assert s.coefficient((m, -1 - m)) == (-1) ** m
    x0 = LaurentRational.monomial(0, 0, 3)
    assert {tuple(map(int, k)): v for k, v in iota20(x0, W02).terms.items()} == {(3, 0): 1}


def test_rat_equal():
    a = LaurentRational({(1, 0): 1, (0, 1): -1})
    b = LaurentRational.monomial(0, 0, 1)
    assert rat_equal(a, b)
    num = LaurentRational({(2, 0): 1, (0, 2): -1}, 1)
    assert rat_equal(num, LaurentRational({(1, 0): 1, (0, 1): 1}))
    assert not rat_equal(a, a + LaurentRational.monomial(Fraction(1, 2), 0, 0) * 0 + 1)


def test_decompose_examples():
    el = GBasisElement("a", Fraction(1, 3), Fraction(1, 3), Fraction(-1, 6))
    basis = [el, GBasisElement("b", 0, 0, 0)]
    assert {k: str(v) for k, v in decompose_in_gbasis(el.function(), basis).items()} == {
        "a": str(LaurentRational({(0, 0): 1}))}
    x1 = LaurentRational.monomial(1, 0, 0)
    assert decompose_in_gbasis(x1 * el.function(), basis) == {"a": x1}
    f = (LaurentRational.monomial(Fraction(1, 2), Fraction(1, 3), Fraction(-1, 6))
         * LaurentRational({(2, 1): 3, (0, 0): -1}))
    dec = decompose_in_gbasis(f, basis)
    assert list(dec) == ["a"]
    (back,) = reconstruct_from_gbasis(dec, basis)
    assert rat_equal(back, f)
    with pytest.raises(NotInSpanError):
        decompose_in_gbasis(LaurentRational.monomial(Fraction(1, 4), 0, 0), basis)


def test_text_round_trip():
    f = (LaurentRational.monomial(Fraction(1, 2), -1, Fraction(-1, 4))
         * LaurentRational({(1, 0): CycloNumber(4, [1, 2]), (0, 3): CycloNumber(4, [0, -1])}, 2))
    assert rat_equal(parse_rat(format_rat(f), 4), f)
    with pytest.raises(RatParseError):
        parse_rat("x1^(1) * nonsense")


@st.composite
def rationals(draw):
    """Raw data (terms, u, prefactor) of a function with core degree <= 6."""
    n = draw(st.integers(1, 4))
    terms = {}
    for _ in range(n):
        i = draw(st.integers(-3, 3))
        j = draw(st.integers(-3, 3))
        terms[(i, j)] = CycloNumber.rational(draw(st.integers(-4, 4).filter(bool)), ORDER)
    u = draw(st.integers(0, 3))
    cosets = st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(3, 4)])
    return terms, u, (draw(cosets), draw(cosets), draw(cosets))


def build(raw):
    terms, u, pre = raw
    f = LaurentRational(terms, u, pre)
    p, q, s = pre
    flat = [(p + i, q + j, s - u, c) for (i, j), c in terms.items()]
    return f, flat


def sparse(series):
    return {k: v for k, v in series.terms.items() if v}


@settings(max_examples=50, deadline=None)
@given(rationals())
def test_iota_maps_against_brute_force(raw):
    f, flat = build(raw)
    assert sparse(iota12(f, W12)) == expand12(flat, 8)
    assert sparse(iota21(f, W12, order=ORDER)) == expand21(flat, 8, ORDER)
    assert sparse(iota20(f, W02)) == expand20(flat, 8)


@pytest.mark.parametrize("t", [1, 2, 3])
def test_iota_difference_of_poles(t):
    f = LaurentRational.monomial(0, 0, -t)
    a, b = iota12(f, W12), iota21(f, W12)
    diff = dict(a.terms)
    for k, v in b.terms.items():
        diff[k] = diff.get(k, 0) - v
    assert {k: v for k, v in diff.items() if v} == delta_derivative(t, 8)


@settings(max_examples=30, deadline=None)
@given(rationals(), rationals())
def test_iota12_is_multiplicative(ra, rb):
    f, _ = build(ra)
    g, _ = build(rb)
    prod = s_mul(iota12(f, W12), iota12(g, W12))
    direct = iota12(f * g, W12)
    assert series_equal_on(prod, direct, prod.window) is None


@settings(max_examples=30, deadline=None)
@given(rationals())
def test_decompose_reconstruct(raw):
    f, _ = build(raw)
    if f.is_zero():
        return
    p, q, s = f.prefactor
    basis = [GBasisElement("x", p + s, q, s)]
    dec = decompose_in_gbasis(f, basis)
    (back,) = reconstruct_from_gbasis(dec, basis)
    assert rat_equal(back, f)


def test_iota12_iota21_agree_without_poles():
    f = LaurentRational({(3, -1): 2, (-2, 4): 7})
    assert iota12(f, W12).terms == iota21(f, W12).terms
