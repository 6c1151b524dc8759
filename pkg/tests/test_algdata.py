from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ioalg.algdata import (DualVector, InstanceError, Vec, dual_pair, exponent_cosets,
                           intertwiner_apply, load_instance, parse_instance, save_instance,
                           save_text)
from ioalg.examples import make_cyclic, make_trivial_voa

Z2_TEXT = save_text(make_cyclic(2, Fraction(1, 4), name="Z2"))


def test_trivial_instance_shape():
    inst = make_trivial_voa()
    assert inst.colors.colors == ("e",)
    assert inst.spaces["e"].dims[0] == 1
    assert exponent_cosets(inst, "e", "e") == {0}


def test_z2_order_and_cosets():
    inst = parse_instance(Z2_TEXT, "Z2")
    assert inst.order % 8 == 0
    assert exponent_cosets(inst, "1", "1") == {Fraction(1, 2), Fraction(1, 4)}
    assert exponent_cosets(inst, "0", "1") == {0, Fraction(1, 4)}
    for a in inst.colors.colors:
        assert 0 in exponent_cosets(inst, inst.e, a)


def test_save_load_round_trip(tmp_path, instances):
    for name, inst in instances.items():
        path = tmp_path / f"{name}.ioa"
        save_instance(inst, path)
        again = load_instance(path)
        assert save_text(again) == save_text(inst)
        assert again == inst


def _broken(old, new):
    assert old in Z2_TEXT
    return Z2_TEXT.replace(old, new)


@pytest.mark.parametrize("old,new,where", [
    ("0 1 -> 1 : 1\n", "0 1 -> 1 : 1\n0 1 -> 0 : 1\n", "[fusion]"),
    ("1 1 -> 0 : 1", "1 1 -> 0 : 2", "[intertwiner 1 1 -> 0]"),
    ("1 = 1/4", "1 = 1/3", ""),
    ("[dims]\n", "[dimz]\n", "[dimz]"),
    ("level 0 : 1", "level 0 : 0", "vacuum vector is zero"),
    ("n=-1/2 w1=0.0 w2=0.0 : 1", "n=-1 w1=0.0 w2=0.0 : 1", "line"),
])
def test_rejections(old, new, where):
    with pytest.raises(InstanceError) as exc:
        parse_instance(_broken(old, new), "bad")
    assert where in str(exc.value)


def test_missing_section_has_line_number():
    text = Z2_TEXT.replace("[vacuum]\nlevel 0 : 1\n", "")
    with pytest.raises(InstanceError, match="vacuum"):
        parse_instance(text, "bad")
    with pytest.raises(InstanceError, match="line 1"):
        parse_instance("garbage\n" + Z2_TEXT, "bad")


def test_vacuum_insertion_and_pairing():
    inst = make_trivial_voa()
    one = inst.vacuum
    s = intertwiner_apply(inst, inst.vertex_operator(), one, one)
    assert s.terms == {(0,): one}
    d = DualVector.basis("e", 0, 0, 1, inst.one())
    assert dual_pair(d, s).terms == {(0,): 1}
    zero = intertwiner_apply(inst, inst.vertex_operator(), Vec("e"), one)
    assert zero.is_zero()


def test_monomial_operator_exponent():
    inst = parse_instance(Z2_TEXT, "Z2")
    v1 = Vec.basis("1", 0, 0, inst.one())
    s = intertwiner_apply(inst, ("1", "1", "0", 1), v1, v1)
    assert list(s.terms) == [(Fraction(-1, 2),)]
    d = DualVector.basis("1", 0, 0, 1, inst.one())
    assert dual_pair(d, s).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["0 0 -> 0", "0 1 -> 1", "1 0 -> 1", "1 1 -> 0"]),
       st.integers(2, 3))
def test_perturbed_fusion_rejected(rule, n):
    with pytest.raises(InstanceError):
        parse_instance(Z2_TEXT.replace(f"{rule} : 1", f"{rule} : {n}"), "bad")
