"""The generating-function calculus: coset algebra, heads, Hensel regions."""

from fractions import Fraction

import pytest

from padiczeta.fields import eta, pick_nonsquare, teichmuller_set
from padiczeta.genfun import (
    CosetCombination,
    ModularGF,
    assemble_gf,
    closed_form_head,
    coset_mul,
    gr_mul,
    head_unimodular,
    hensel_head,
    ig_truncated,
    modular_gf,
    truncated_gf,
)
from padiczeta.quadform import QuadPoly, UnimodularClass
from padiczeta.ratfunc import Poly, RationalFunction, geometric_unit_ball
from padiczeta.oracle import count_exhaustive

from corpus import F3, F4, F5, Z2


def C(field, rep, level, coeff=1):
    return CosetCombination.coset(field, rep, level, coeff)


def test_modular_gf_examples():
    g = modular_gf(QuadPoly.from_ints(F3, 2, [], [1]), 1)
    assert g.coeffs == {(0,): Fraction(1, 3), (1,): Fraction(1, 3), (2,): Fraction(1, 3)}
    g = modular_gf(QuadPoly.from_ints(F3, 2, [[1]]), 1)
    assert g.coeffs == {(0,): Fraction(1, 3), (1,): Fraction(2, 3)}
    g = modular_gf(QuadPoly.from_ints(Z2, 2, [[0, 1], [1, 0]]), 1)
    assert g.coeffs == {(0,): Fraction(1)}
    assert g.is_normalized


def test_gr_mul_examples():
    point = ModularGF(F3, 1, {(1,): Fraction(1)})
    assert gr_mul(point, point).coeffs == {(2,): Fraction(1)}
    uni = modular_gf(QuadPoly.from_ints(F3, 2, [], [1]), 1)
    assert gr_mul(uni, uni) == uni
    fx = modular_gf(QuadPoly.from_ints(F3, 3, [[1]]), 1)
    direct = modular_gf(QuadPoly.from_ints(F3, 3, [[1, 0], [0, 1]]), 1)
    assert gr_mul(fx, fx) == direct


def test_coset_mul_examples():
    assert coset_mul(C(F3, 1, 1), C(F3, 2, 2)) == C(F3, 0, 1)
    # point shift times a linear-image coset: z^b z^(aR) = z^(aR + b)
    assert coset_mul(CosetCombination.point(F3, 2), C(F3, 0, 1)) == C(F3, 2, 1)
    lin = C(F3, 2, 1)  # generating function of 3x + 2
    assert coset_mul(lin, CosetCombination.point(F3, 0)) == lin
    a = C(F4, (1, 1), 2)
    assert coset_mul(a, CosetCombination.point(F4, 0)) == a


def test_coalesce_examples():
    s = C(F3, 0, 1) + C(F3, 1, 1) + C(F3, 2, 1)
    assert s.coalesce().terms == C(F3, 0, 0, 3).terms
    single = C(F3, 1, 2, Fraction(1, 2))
    assert single.coalesce().terms == single.terms
    s = C(F3, 1, 2) + C(F3, 4, 2) + C(F3, 7, 2)
    assert s.coalesce().terms == C(F3, 1, 1, 3).terms


def test_uniformize_examples():
    assert C(F3, 1, 2).uniformize(1) == C(F3, 1, 1)
    f = C(F3, 1, 2, Fraction(1, 2)) + C(F3, 2, 1, Fraction(1, 2))
    assert f.uniformize(0) == CosetCombination.full_ring(F3)
    head = head_unimodular(UnimodularClass.sq(F3, 1))
    assert head.uniformize(1) == head       # heads are pi-uniform for odd p
    h2 = head_unimodular(UnimodularClass.sq(Z2, 1))
    assert h2.uniformize(3) == h2           # 8-uniform at p = 2
    # uniformize(i) of uniformize(j) = uniformize(i) for i <= j
    g = C(F3, 4, 2) + C(F3, 1, 1, Fraction(1, 3))
    assert g.uniformize(2).uniformize(1) == g.uniformize(1)


def test_scale_examples():
    assert CosetCombination.full_ring(F3).scale(3) == C(F3, 0, 1)
    assert C(F3, 1, 1).scale(3) == C(F3, 3, 2)
    f = C(F3, 1, 1) + C(F3, 0, 2)
    assert f.scale(0) == CosetCombination.point(F3, 0, 2)
    # scaling by a unit permutes cosets and preserves the zeta image
    g = head_unimodular(UnimodularClass.sq(F3, 1))
    assert g.scale(2).ig() == g.ig()


def test_ig_examples():
    q = Fraction(3)
    ball = geometric_unit_ball(3)
    assert C(F3, 0, 2).ig() == RationalFunction(Poly.t(2)) * ball
    assert CosetCombination.point(F5, 5).ig() == RationalFunction(Poly.t(1))
    assert C(Z2, 2, 2).ig() == RationalFunction(Poly.t(1))
    assert CosetCombination.point(F3, 0).ig() == RationalFunction(0)
    # scaling property at s in {1, pi, pi^2, 0}
    f = C(F3, 1, 1, Fraction(1, 2)) + C(F3, 0, 1, Fraction(1, 2))
    for e in (0, 1, 2):
        assert f.scale_pi(e).ig() == RationalFunction(Poly.t(e)) * f.ig()
    assert f.scale(0).ig() == RationalFunction(0)


def test_normalization_extraction():
    # multiplying by z^R collapses to the coefficient sum
    f = C(F3, 1, 2, Fraction(2, 5)) + CosetCombination.point(F3, 7, Fraction(1, 5))
    zr = CosetCombination.full_ring(F3)
    assert coset_mul(f, zr) == CosetCombination.full_ring(F3, f.normalization())


def test_uniform_product_rule():
    # pi^i-uniform F times G equals F times the pi^j-uniformization of G, j >= i
    F = C(F3, 1, 1, Fraction(1, 2)) + C(F3, 0, 1, Fraction(1, 2))  # pi-uniform
    G = C(F3, 2, 3) + C(F3, 4, 2, Fraction(1, 3)) + CosetCombination.point(F3, 1)
    for j in (1, 2):
        assert coset_mul(F, G) == coset_mul(F, G.uniformize(j))


def test_head_unimodular_examples():
    q = Fraction(3)
    alpha = pick_nonsquare(F3, 1)
    head = head_unimodular(UnimodularClass.sq(F3, 1))
    expect = (CosetCombination.full_ring(F3) + C(F3, 0, 1, -1 / q)
              + sum((C(F3, t, 1, Fraction(eta(t), 3))
                     for t in teichmuller_set(F3, 1) if t.is_unit()),
                    CosetCombination.zero(F3)))
    assert head == expect
    hyp = head_unimodular(UnimodularClass.hyp(F4))
    qq = Fraction(4)
    expect = (C(F4, 0, 1) + C(F4, 0, 2, 1 / qq)) * (1 - 1 / qq)
    assert hyp == expect
    assert head_unimodular(UnimodularClass.zero(F3)) == CosetCombination.zero(F3)


def test_head_mass():
    for cls in [UnimodularClass.sq(F3, 1), UnimodularClass.hyp(F5),
                UnimodularClass.sq(Z2, 3), UnimodularClass.ell(F4)]:
        q = cls.field.q
        assert head_unimodular(cls).normalization() == 1 - Fraction(1, q ** cls.rank)


def test_hensel_examples():
    assert hensel_head(QuadPoly.from_ints(F3, 1, [], [1]), ["all"], 0) == \
        CosetCombination.full_ring(F3)
    assert hensel_head(QuadPoly.from_ints(Z2, 1, [[1]], [1]), ["all"], 0) == \
        C(Z2, 0, 1)
    got = hensel_head(QuadPoly.from_ints(F3, 1, [[1]]), ["units"], 0)
    assert got == head_unimodular(UnimodularClass.sq(F3, 1))
    with pytest.raises(ValueError, match="derivative valuation"):
        hensel_head(QuadPoly.from_ints(F3, 1, [[1]]), ["all"], 0)


def test_truncated_gf_projections():
    for cls, K in [(UnimodularClass.sq(F3, 1), 4), (UnimodularClass.hyp(Z2), 4),
                   (UnimodularClass.ell(F4), 3)]:
        g = truncated_gf(cls, K)
        poly = cls.quadpoly(K)
        for k in range(0, K + 1):
            assert g.project(k) == modular_gf(poly, k)


def test_assemble_gf_matches_histograms():
    from padiczeta.quadform import JordanForm
    jf = JordanForm.make(F3, [(0, UnimodularClass.sq(F3, 1))], lam=None, c=0)
    ag = assemble_gf(jf, 3)
    poly = jf.standard_poly(4)
    for k in range(ag.valid_level + 1):
        assert ag.comb.project(k) == modular_gf(poly, k)
    jf = JordanForm.make(Z2, [(0, UnimodularClass.hyp(Z2)), (1, UnimodularClass.sq(Z2, 3))],
                         lam=3, c=0)
    ag = assemble_gf(jf, 4)
    poly = jf.standard_poly(5)
    for k in range(ag.valid_level + 1):
        assert ag.comb.project(k) == modular_gf(poly, k)
    # a bare unit-coefficient linear form assembles to the whole ring
    jf = JordanForm.make(F3, [], lam=0, c=0)
    assert assemble_gf(jf, 3).comb == CosetCombination.full_ring(F3)
    # constants shift the histogram
    jf = JordanForm.make(F3, [], lam=None, c=5)
    ag = assemble_gf(jf, 2)
    assert ag.comb == CosetCombination.point(F3, 5)


def test_ig_truncated_examples():
    poly = QuadPoly.from_ints(F3, 6, [[1]])
    fam = [modular_gf(poly, k) for k in range(5)]
    vols = ig_truncated(fam)
    assert vols == [Fraction(2, 3), 0, Fraction(2, 9), 0]
    const = QuadPoly.from_ints(F3, 6, [], [], 1)
    fam = [modular_gf(const, k) for k in range(4)]
    assert ig_truncated(fam) == [1, 0, 0]
    broken = [modular_gf(poly, 0), modular_gf(poly, 1),
              modular_gf(QuadPoly.from_ints(F3, 6, [], [1]), 2)]
    with pytest.raises(ValueError, match="projection-consistent"):
        ig_truncated(broken)


def test_projection_compatibility():
    for field in (F3, Z2, F4):
        poly = QuadPoly.from_ints(field, 4, [[1, 0], [0, 3]], [0, 1])
        for k in (1, 2, 3):
            g = modular_gf(poly, k)
            for j in range(k + 1):
                assert g.project(j) == modular_gf(poly, j)


def test_oracle_engine_agreement_small():
    from corpus import F8
    for field in (F3, F5, Z2, F4, F8):
        poly = QuadPoly.from_ints(field, 4, [[1, 1], [1, 0]], [0, 2], 1)
        for k in (1, 2):
            hist = count_exhaustive(poly, k)
            assert modular_gf(poly, k).coeffs == hist.normalized()


def test_closed_form_heads_spot():
    for cls in [UnimodularClass.sq(F3, 2), UnimodularClass.ell(F5),
                UnimodularClass.hyp(Z2), UnimodularClass.sq(F4, (3, 2)),
                UnimodularClass(Z2, 0, False, ((1,), (7,)))]:
        assert closed_form_head(cls) == head_unimodular(cls)


from hypothesis import given, settings
from hypothesis import strategies as st

_coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=9)


def _combos(field):
    reps = st.integers(min_value=0, max_value=26)
    term = st.tuples(reps, st.integers(min_value=0, max_value=3), _coeffs)
    return st.lists(term, min_size=1, max_size=5).map(
        lambda ts: sum((C(field, r, lv, c) for r, lv, c in ts),
                       CosetCombination.zero(field)))


@settings(max_examples=50, deadline=None)
@given(_combos(F3), st.integers(min_value=0, max_value=3),
       st.integers(min_value=0, max_value=3))
def test_uniformize_tower_property(f, i, j):
    i, j = min(i, j), max(i, j)
    assert f.uniformize(j).uniformize(i) == f.uniformize(i)
    assert f.uniformize(i).uniformize(i) == f.uniformize(i)
    assert f.uniformize(i).normalization() == f.normalization()


@settings(max_examples=50, deadline=None)
@given(_combos(Z2), st.integers(min_value=0, max_value=2))
def test_scale_then_ig_property(f, e):
    from padiczeta.ratfunc import Poly, RationalFunction
    assert f.scale_pi(e).ig() == RationalFunction(Poly.t(e)) * f.ig()


@settings(max_examples=40, deadline=None)
@given(_combos(F3), _combos(F3))
def test_product_projects_like_group_ring(f, g):
    # phi_k is an algebra map: project(f * g) = gr_mul(project f, project g)
    k = 2
    assert coset_mul(f, g).project(k) == gr_mul(f.project(k), g.project(k))
