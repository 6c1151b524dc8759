from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ioalg.exactnum import root_of_unity
from ioalg.series import (INF, FormalSeries, NonSummableError, SeriesError, UncertifiedError,
                          VariableMismatchError, Window, binomial_expand, delta_series,
                          delta_two_summand, derivative, dump, extract_coefficient, from_terms,
                          monomial, residue, s_add, s_mul, s_neg, s_sub, series_equal_on,
                          substitute_phase, zero_series)

X = ("x",)


def poly(coeffs: dict):
    return from_terms(X, {(e,): c for e, c in coeffs.items()})


def test_add_cancels_and_intersects_windows():
    d = delta_series("x", Window({"x": (-3, 3)}))
    assert s_add(d, s_neg(d)).is_zero()
    h = monomial(X, [Fraction(1, 2)])
    assert s_add(h, h).terms == {(Fraction(1, 2),): 2}
    a = delta_series("x", Window({"x": (-3, 3)}))
    b = delta_series("x", Window({"x": (-2, 5)}))
    assert s_add(a, b).window == Window({"x": (-2, 3)})
    with pytest.raises(VariableMismatchError):
        s_add(a, monomial(("y",), [0]))


def test_geometric_series():
    geo = FormalSeries(X, {(n,): 1 for n in range(0, 12)}, window=Window({"x": (-INF, 11)}),
                       support={"x": (0, INF)})
    prod = s_mul(poly({0: 1, 1: -1}), geo)
    assert prod.window.get("x")[1] == 11
    assert series_equal_on(prod, poly({0: 1}), prod.window) is None
    assert prod.coefficient((0,)) == 1


def test_polynomial_times_delta():
    d = delta_series("x", Window({"x": (-10, 10)}))
    f = poly({3: 2, 1: -1})
    prod = s_mul(f, d)
    assert prod.window.get("x") == (-7, 11)
    for n in range(-7, 12):
        assert prod.coefficient((n,)) == 1


def test_delta_squared_is_not_summable():
    d = delta_series("x", Window({"x": (-4, 4)}))
    with pytest.raises(NonSummableError):
        s_mul(d, d)


def test_residue():
    d = delta_series("x", Window({"x": (-5, 5)}))
    assert residue(d, "x").terms == {(): 1}
    for n in range(-3, 4):
        shifted = s_mul(monomial(X, [n]), d)
        assert residue(shifted, "x").terms == {(): 1}
    half = monomial(X, [Fraction(1, 2)])
    assert residue(half, "x").is_zero()
    far = delta_series("x", Window({"x": (0, 5)}))
    with pytest.raises(UncertifiedError):
        residue(far, "x")


def test_delta_coefficients():
    d = delta_series("x", Window({"x": (-8, 8)}))
    assert extract_coefficient(d, (0,)) == 1
    assert extract_coefficient(d, (-7,)) == 1
    assert extract_coefficient(d, (Fraction(1, 2),)) == 0
    with pytest.raises(UncertifiedError):
        extract_coefficient(d, (9,))
    assert extract_coefficient(zero_series(X, Window({"x": (-1, 1)})), (0,)) == 0
    with pytest.raises(SeriesError):
        delta_series("x", Window())


def test_binomial_expansion():
    w = Window.box(("x1", "x2"), -10, 10)
    inv = binomial_expand(("x1", -1, "x2"), -1, w)
    for m in range(0, 10):
        assert inv.coefficient((-1 - m, m)) == 1
    sq = binomial_expand(("x1", 1, "x2"), 2, w)
    assert sq.terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    other = binomial_expand(("x2", -1, "x1"), -1, Window.box(("x2", "x1"), -10, 10))
    swapped = {(b, a) for a, b in other.terms}
    assert not swapped & set(inv.terms)


def test_delta_two_summand_coefficients():
    from sympy import binomial

    w = Window.box(("x0", "x1", "x2"), -6, 6)
    d = delta_two_summand(("x1", -1, "x2"), "x0", w)
    for n in range(-5, 6):
        for m in range(0, 7):
            key = (-n - 1, n - m, m)
            if all(-6 <= e <= 6 for e in key):
                assert d.coefficient(key) == (-1) ** m * int(binomial(n, m))


def test_substitute_phase():
    half = from_terms(X, {(Fraction(1, 2),): 1, (Fraction(-3, 2),): 1})
    out = substitute_phase(half, "x", -1, 4)
    z4 = root_of_unity(1, 4)
    assert out.coefficient((Fraction(1, 2),)) == -z4
    assert out.coefficient((Fraction(-3, 2),)) == -z4
    back = substitute_phase(out, "x", 1, 4)
    assert back.terms == {k: root_of_unity(0, 4) for k in half.terms}
    ints = poly({2: 3, -1: 5})
    assert substitute_phase(ints, "x", 2, 4).terms == {
        k: 3 * root_of_unity(0, 4) if k == (2,) else 5 * root_of_unity(0, 4) for k in ints.terms}


def test_dump_is_sorted():
    text = dump(poly({2: 1, -1: 3}))
    assert text.splitlines() == ["(-1) : 3", "(2) : 1"]


laurent = st.dictionaries(st.integers(-10, 10), st.integers(-9, 9).filter(bool), min_size=1,
                          max_size=8)


@settings(max_examples=50, deadline=None)
@given(laurent)
def test_f_delta_is_f1_delta(coeffs):
    f = poly(coeffs)
    d = delta_series("x", Window({"x": (-30, 30)}))
    lhs = s_mul(f, d)
    f1 = sum(coeffs.values())
    rhs = s_mul(poly({0: f1}), d)
    box = Window({"x": (-20, 20)})
    assert series_equal_on(lhs, rhs, box) is None


@settings(max_examples=50, deadline=None)
@given(laurent)
def test_residue_of_derivative_vanishes(coeffs):
    assert residue(derivative(poly(coeffs), "x"), "x").is_zero()


@settings(max_examples=40, deadline=None)
@given(laurent, laurent, laurent)
def test_mul_commutative_associative(a, b, c):
    fa, fb, fc = poly(a), poly(b), poly(c)
    assert s_mul(fa, fb).terms == s_mul(fb, fa).terms
    assert s_mul(s_mul(fa, fb), fc).terms == s_mul(fa, s_mul(fb, fc)).terms


@settings(max_examples=30, deadline=None)
@given(laurent, st.integers(-12, 12))
def test_product_with_delta_matches_brute_force(coeffs, n):
    d = delta_series("x", Window({"x": (-15, 15)}))
    prod = s_mul(poly(coeffs), d)
    lo, hi = prod.window.get("x")
    if lo <= n <= hi:
        want = sum(c for e, c in coeffs.items() if -15 <= n - e <= 15)
        assert prod.coefficient((n,)) == want


def test_sub_of_equal_series_is_zero():
    a = poly({1: 2, 3: 4})
    assert s_sub(a, a).is_zero()
