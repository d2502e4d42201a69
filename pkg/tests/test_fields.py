"""Ground-ring arithmetic: valuations, Teichmuller lifts, trace, squares."""

import pytest

from padiczeta.fields import (
    INFINITY,
    FieldDesc,
    eta,
    is_square_unit,
    pick_nonsquare,
    pick_xi,
    teichmuller,
    teichmuller_set,
    trace,
    trace_parity,
    trace_zero_teichmullers,
    valuation,
)

from corpus import F3, F4, F5, F8, Z2


def test_field_construction_checks():
    with pytest.raises(ValueError):
        FieldDesc.make(4)
    with pytest.raises(ValueError):
        FieldDesc.make(2, 2, (0, 1, 1))  # x^2 + x is reducible mod 2
    assert F4.modulus == (1, 1, 1)
    assert F3.q == 3 and F4.q == 4 and F8.q == 8
    assert Z2.ell == 1 and F3.ell == 0


def test_valuation_examples():
    assert valuation(F3.zero(4, exact=True)) == INFINITY
    assert valuation(F3.elem(12, 4)) == 1
    assert valuation(Z2.elem(8, 5)) == 3
    v = valuation(F3.elem(27, 3))  # zero at precision 3, not declared exact
    assert v.is_floor and v.value == 3


def test_precision_discipline():
    with pytest.raises(ValueError):
        F3.elem(1, 2) + F3.elem(1, 3)
    assert (F3.elem(5, 3) + F3.elem(4, 3)).coeffs == (9,)


def test_teichmuller_examples():
    assert teichmuller(F3.elem(2, 2)).coeffs == (8,)
    assert teichmuller(F3.one(4)) == F3.one(4)
    t = teichmuller(F4.gen(2))
    assert t == F4.gen(2) and t ** 4 == t


@pytest.mark.parametrize("field,k", [(F3, 3), (F5, 2), (Z2, 4), (F4, 3), (F8, 2)])
def test_teichmuller_idempotence_and_fixed_points(field, k):
    for t in teichmuller_set(field, k):
        assert teichmuller(t) == t
        assert t ** field.q == t


def test_trace_examples():
    assert trace(Z2.elem(13, 4)).coeffs == (13,)  # identity on the prime field
    x = F4.gen(1)
    assert trace(x).coeffs == (1,)
    assert trace(F4.one(1)).coeffs == (0,)
    with pytest.raises(ValueError):
        trace(F3.one(2))


def test_trace_is_additive_and_frobenius_invariant():
    from padiczeta.fields import frobenius
    for a in F4.all_elems(2):
        for b in (F4.one(2), F4.gen(2)):
            assert trace(a + b) == trace(a) + trace(b)
        assert trace(frobenius(a)) == trace(a)


def test_square_unit_examples():
    assert is_square_unit(F5.elem(4, 1))
    assert is_square_unit(Z2.elem(17, 5))
    assert not is_square_unit(Z2.elem(5, 5))
    with pytest.raises(ValueError):
        is_square_unit(F3.elem(3, 2))
    with pytest.raises(ValueError):
        is_square_unit(Z2.elem(3, 2))  # needs k >= 3


@pytest.mark.parametrize("field", [Z2, F4])
def test_square_units_match_brute_force_mod8(field):
    squares = {(u * u).coeffs for u in field.all_elems(3) if u.is_unit()}
    for u in field.all_elems(3):
        if u.is_unit():
            assert is_square_unit(u) == (u.coeffs in squares)


@pytest.mark.parametrize("field", [Z2, F4, F8])
def test_square_unit_count_mod8(field):
    squares = {(u * u).coeffs for u in field.all_elems(3) if u.is_unit()}
    assert len(squares) == (field.q - 1) * field.q // 2


def test_eta_examples():
    assert eta(F3.elem(3, 2)) == 0
    assert eta(F3.one(1)) == 1
    assert eta(F5.elem(2, 1)) == -1
    with pytest.raises(ValueError):
        eta(Z2.one(3))


@pytest.mark.parametrize("field", [F3, F5, FieldDesc.make(3, 2)])
def test_eta_multiplicative(field):
    units = [u for u in field.all_elems(1) if u.is_unit()]
    for a in units:
        for b in units:
            assert eta(a * b) == eta(a) * eta(b)


def test_pick_nonsquare_and_xi():
    assert pick_nonsquare(F3, 1).coeffs == (2,)
    assert eta(pick_nonsquare(F5, 1)) == -1
    assert pick_xi(Z2, 3) == Z2.one(3)
    xi = pick_xi(F4, 3)
    assert trace_parity(xi) == 1
    assert xi.reduce_to(1) == F4.gen(1)
    with pytest.raises(ValueError):
        pick_nonsquare(Z2, 1)
    # 1 + 4*xi is not a square
    one_plus = Z2.one(3) + Z2.elem(4, 3) * pick_xi(Z2, 3)
    assert not is_square_unit(one_plus)


def test_trace_zero_teichmullers_size():
    for field in (Z2, F4, F8):
        assert len(trace_zero_teichmullers(field, 2)) == field.q // 2


def test_inverse_and_division():
    for field, k in [(F3, 4), (F4, 4), (F5, 3), (F8, 3)]:
        for u in list(field.all_elems(min(k, 2)))[:40]:
            if not u.is_unit():
                continue
            lift = field.elem(u.coeffs, k)
            assert lift * lift.inverse() == field.one(k)
    a = F3.elem(18, 4)
    assert a.divide_by_pi(2).coeffs == (2,)
    with pytest.raises(ValueError):
        F3.elem(1, 3).divide_by_pi(1)
