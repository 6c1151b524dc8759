from fractions import Fraction

import pytest

from ioalg.examples import Fault, inject_fault, make_trivial_voa
from ioalg.checkers import check_voa
from ioalg.jacobi import (ChannelTensor, canonical_gbasis, channels, check_duality_formal,
                          check_jacobi, check_jacobi_explicit,
                          decompose_product, iterate_I, multiply_P, reconstruct, _Maps)
from ioalg.series import series_equal_on

V = (0, 0)


def failing(rep):
    return [r.subject for r in rep.results if r.status == "fail"]


def test_trivial_products_and_iterates():
    inst = make_trivial_voa()
    Z = ChannelTensor.basis("P", ("e",) * 5 + (1, 1), inst.one())
    assert multiply_P(inst, Z, V, V, V, V).terms == {(0, 0): 1}
    assert iterate_I(inst, Z, V, V, V, V).terms == {(0, 0): 1}
    assert multiply_P(inst, ChannelTensor("P"), V, V, V, V).is_zero()
    assert iterate_I(inst, ChannelTensor("I"), V, V, V, V).is_zero()
    basis = canonical_gbasis(inst, "e", "e", "e", "e")
    g = decompose_product(inst, Z, V, V, V, V, basis, 8)
    assert [el.function().is_zero() for el in basis] == [False]
    (only,) = g.coeffs.values()
    assert only.terms == {(0, 0): 1}


def test_z2_product_is_a_monomial(instances):
    z2 = instances["Z2"]
    Z = ChannelTensor.basis("P", ("1", "1", "1", "1", "0", 1, 1), z2.one())
    # Y(v1, x1) Y(v1, x2) v1: x2^{h0 - 2 h1} then x1^{h1 - h0 - h1}
    assert multiply_P(z2, Z, V, V, V, V).terms == {(Fraction(0), Fraction(-1, 2)): 1}
    basis = canonical_gbasis(z2, "1", "1", "1", "1")
    g = decompose_product(z2, Z, V, V, V, V, basis, 8)
    assert len(g.coeffs) == 1
    (series,) = g.coeffs.values()
    assert len(series.terms) == 1
    assert all(e.denominator == 1 for k in series.terms for e in k)


def test_reconstruction_on_every_channel(instances):
    for inst in instances.values():
        maps = _Maps(inst)
        for ch in channels(inst, 4):
            basis, (Z, _, FZ), (g, _, h) = maps.decompositions(ch, 4)
            P = multiply_P(inst, Z, ch.b1, ch.b2, ch.b3, ch.d4)
            rp = reconstruct(g, 4, inst.order)
            assert series_equal_on(rp, P, rp.window) is None
            I = iterate_I(inst, FZ, ch.b1, ch.b2, ch.b3, ch.d4)
            ri = reconstruct(h, 4, inst.order)
            assert series_equal_on(ri, I, ri.window) is None


def test_vacuum_specialization_matches_classical_verdict():
    inst = make_trivial_voa()
    faults = [None, Fault("table", ("e", "e", "e", 1, 0, 0, 0, 0, 0, 0), "2"),
              Fault("table", ("e", "e", "e", 1, 0, 0, 0, 0, 0, 0), "-1")]
    for f in faults:
        cur = inst if f is None else inject_fault(inst, f)
        classical = next(r.status for r in check_voa(cur, 8).results if r.axiom == "jacobi")
        engine = check_jacobi(cur, 8)
        assert {r.status for r in engine.results if r.axiom != "analytic-convergence"} == {
            classical}


def test_explicit_form_agrees(instances):
    for name in ("trivial", "Z2"):
        rep = check_jacobi_explicit(instances[name], 6)
        agree = [r for r in rep.results if r.axiom == "jacobi-forms-agree"]
        assert agree and agree[0].status == "pass"


def test_z2_known_channel_failure(instances):
    rep = check_jacobi(instances["Z2"], 6)
    assert failing(rep) == ["1,1,1;1|0.1.1"]
    wit = next(r.witness for r in rep.results if r.status == "fail")
    assert (wit.expected, wit.actual) == ("-1", "2")


def test_transposed_fusing_indices_fail(instances):
    z2 = instances["Z2"]
    swapped = {(a1, a2, a3, a4): z2.F[(a3, a2, a1, a4)] for (a1, a2, a3, a4) in z2.F}
    rep = check_jacobi_explicit(z2, 6, F=swapped)
    assert len(failing(rep)) > 1
    assert "all channels" in failing(rep)


def test_duality_detects_perturbed_fusing(instances):
    z2 = instances["Z2"]
    assert check_duality_formal(z2, 6).ok
    bad = inject_fault(z2, Fault("F", ("0", "1", "1", "0", 0, 0), "-1"))
    rep = check_duality_formal(bad, 6)
    axioms = {r.axiom for r in rep.results if r.status == "fail"}
    assert {"commutativity-formal", "associativity-formal"} <= axioms


def test_duality_detects_perturbed_braiding(instances):
    z4 = instances["Z4"]
    base = set(failing(check_duality_formal(z4, 6)))
    bad = inject_fault(z4, Fault("Omega", ("1", "2", "3", 0, 0), "-1"))
    new = set(failing(check_duality_formal(bad, 6))) - base
    assert new


@pytest.mark.parametrize("name", ["trivial", "Z2", "Z3", "Z4"])
def test_associativity_formal_never_fails(instances, name):
    rep = check_duality_formal(instances[name], 6)
    assert not [r for r in rep.results if r.axiom == "associativity-formal"
                and r.status == "fail"]
