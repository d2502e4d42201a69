"""Jordan decomposition, classification, addition rules, standard forms."""

import itertools

import pytest

from padiczeta.fields import eta, valuation
from padiczeta.oracle import count_exhaustive
from padiczeta.quadform import (
    JordanForm,
    PrecisionError,
    QuadPoly,
    UnimodularClass,
    UnsupportedReduction,
    add_forms,
    canonical_square_coeff,
    classify_unimodular,
    invariants,
    jordan_decompose,
    reduce_standard,
    square_class_reps,
)

from corpus import F3, F4, F5, Z2, table_classes

TABLE4_ROWS = {
    (1, 3, 5): (1, "hyp"), (1, 1, 7): (1, "hyp"), (5, 5, 7): (1, "hyp"),
    (1, 3, 7): (3, "hyp"), (3, 3, 5): (3, "hyp"), (5, 7, 7): (3, "hyp"),
    (1, 5, 7): (5, "hyp"), (3, 5, 5): (5, "hyp"), (1, 1, 3): (5, "hyp"),
    (3, 5, 7): (7, "hyp"), (1, 7, 7): (7, "hyp"), (1, 3, 3): (7, "hyp"),
    (3, 3, 3): (1, "ell"), (3, 7, 7): (1, "ell"),
    (1, 1, 1): (3, "ell"), (1, 5, 5): (3, "ell"),
    (7, 7, 7): (5, "ell"), (3, 3, 7): (5, "ell"),
    (5, 5, 5): (7, "ell"), (1, 1, 5): (7, "ell"),
}


def sq(field, a):
    return UnimodularClass.sq(field, a)


def test_square_class_reps():
    assert square_class_reps(Z2) == ((1,), (3,), (5,), (7,))
    assert len(square_class_reps(F4)) == 8
    assert square_class_reps(F3) == ((1,), (2,))


def test_add_forms_table4_rows():
    for (a, b, c), (d, plane) in TABLE4_ROWS.items():
        got = add_forms(add_forms(sq(Z2, a), sq(Z2, b)), sq(Z2, c))
        want = UnimodularClass(Z2, 1 if plane == "hyp" else 0, plane == "ell", ((d,),))
        assert got == want, (a, b, c)


def test_add_forms_elliptic_pair():
    for field in (F3, F5, Z2, F4):
        assert add_forms(UnimodularClass.ell(field), UnimodularClass.ell(field)) == \
            UnimodularClass.hyp(field, 2)


def test_add_forms_commutative_associative():
    from padiczeta.genfun import class_level_gf
    cls = table_classes(Z2, 2)
    for u1, u2 in itertools.product(cls, repeat=2):
        assert add_forms(u1, u2) == add_forms(u2, u1)
    for u1, u2, u3 in itertools.islice(itertools.product(cls, repeat=3), 0, None, 7):
        left = add_forms(add_forms(u1, u2), u3)
        right = add_forms(u1, add_forms(u2, u3))
        assert left.rank == right.rank
        assert class_level_gf(left) == class_level_gf(right)


def test_invariants_examples():
    hyp = UnimodularClass.hyp(F5)
    r, d, norm = invariants(hyp)
    assert (r, norm) == (2, "R") and eta(F5.elem(d, 1) * (-F5.one(1))) == 1
    assert invariants(UnimodularClass.zero(F5)) == (0, (1,), "0")
    u = add_forms(sq(F5, 2), UnimodularClass.hyp(F5))
    r, d, norm = invariants(u)
    assert r == 3 and norm == "R"
    # disc = -a for Sq(a) + Hyp
    assert eta(F5.elem(d, 1) * (-F5.elem(2, 1)).inverse()) == 1
    assert invariants(UnimodularClass.hyp(Z2))[2] == "2R"


def _assemble(field, blocks, k):
    n = sum(len(m) for m in blocks)
    M = [[field.zero(k) for _ in range(n)] for _ in range(n)]
    off = 0
    for m in blocks:
        for i in range(len(m)):
            for j in range(len(m)):
                M[off + i][off + j] = m[i][j]
        off += len(m)
    return M


def test_jordan_examples():
    blocks, _, _ = jordan_decompose(QuadPoly.from_ints(F3, 6, [[1, 0], [0, 3]]))
    assert [(i, q.render()) for i, q in blocks] == [(0, "Sq(1)"), (1, "Sq(1)")]
    blocks, _, _ = jordan_decompose(QuadPoly.from_ints(Z2, 6, [[0, 1], [1, 0]]))
    assert blocks == [(0, UnimodularClass.hyp(Z2))]
    blocks, _, _ = jordan_decompose(QuadPoly.from_ints(Z2, 6, [[2, 1], [1, 2]]))
    assert blocks == [(0, UnimodularClass.ell(Z2))]


@pytest.mark.parametrize("field,mat", [
    (F3, [[2, 1, 0], [1, 4, 3], [0, 3, 9]]),
    (F5, [[0, 5, 1], [5, 10, 0], [1, 0, 25]]),
    (Z2, [[2, 1, 0, 4], [1, 2, 2, 0], [0, 2, 0, 1], [4, 0, 1, 0]]),
    (F4, [[(1, 1), (0, 1), 0], [(0, 1), 2, (1, 0)], [0, (1, 0), (2, 2)]]),
])
def test_decomposition_soundness(field, mat):
    qp = QuadPoly.from_ints(field, 10, mat)
    blocks, basis, prim = jordan_decompose(qp)
    kw = min(e.k for row in basis for e in row)
    n = qp.n
    # B^T M B must equal the assembled primitive block matrix exactly
    got = [[field.zero(kw) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = field.zero(kw)
            for a in range(n):
                for b in range(n):
                    acc = acc + basis[a][i].reduce_to(kw) * \
                        qp.M[a][b].reduce_to(kw) * basis[b][j].reduce_to(kw)
            got[i][j] = acc
    expected = [[field.zero(kw) for _ in range(n)] for _ in range(n)]
    for expo, kind, payload, vars_ in prim:
        if kind == "zero":
            continue
        scale = field.elem(field.p ** expo, kw)
        if kind == "sq":
            v = vars_[0]
            expected[v][v] = scale * payload.reduce_to(kw)
        else:
            (g11, g12), (_, g22) = payload
            i, j = vars_
            expected[i][i] = scale * g11.reduce_to(kw)
            expected[i][j] = scale * g12.reduce_to(kw)
            expected[j][i] = scale * g12.reduce_to(kw)
            expected[j][j] = scale * g22.reduce_to(kw)
    assert got == expected


def test_classification_examples():
    qp = QuadPoly.from_ints(F5, 4, [[2, 0], [0, 3]])
    assert classify_unimodular(F5, qp.M) == UnimodularClass.hyp(F5)
    qp = QuadPoly.from_ints(F3, 4, [[1]])
    assert classify_unimodular(F3, qp.M) == sq(F3, 1)
    qp = QuadPoly.from_ints(Z2, 6, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert classify_unimodular(Z2, qp.M) == UnimodularClass(Z2, 0, True, ((3,),))
    with pytest.raises(ValueError):
        classify_unimodular(F3, QuadPoly.from_ints(F3, 4, [[3]]).M)


@pytest.mark.parametrize("field", [F3, F5])
def test_classification_roundtrip_odd(field):
    for cls in table_classes(field, 5):
        if cls.rank == 0:
            continue
        assert classify_unimodular(field, cls.matrix(4)) == cls


@pytest.mark.parametrize("field", [Z2, F4])
def test_classification_roundtrip_two(field):
    for cls in table_classes(field, 3):
        if cls.rank == 0:
            continue
        got = classify_unimodular(field, cls.matrix(6))
        # table shapes may be duplicated; compare full invariants plus the
        # level-3 value distribution of the shapes
        assert (got.rank, got.norm_code()) == (cls.rank, cls.norm_code())
        from padiczeta.genfun import modular_gf
        assert modular_gf(got.quadpoly(3), 3) == modular_gf(cls.quadpoly(3), 3)


def test_addition_consistency_with_classification():
    from padiczeta.genfun import modular_gf
    cls = [c for c in table_classes(Z2, 2) if c.rank > 0]
    for u1, u2 in itertools.product(cls, repeat=2):
        folded = add_forms(u1, u2)
        direct = _assemble(Z2, [u1.matrix(6), u2.matrix(6)], 6)
        classified = classify_unimodular(Z2, direct)
        assert folded.rank == classified.rank
        assert modular_gf(folded.quadpoly(3), 3) == modular_gf(classified.quadpoly(3), 3)


def _normalized_hist(qp, k):
    return count_exhaustive(qp, k).normalized()


def check_isospectral(qp, jf, kmax=4):
    out = jf.standard_poly(max(kmax, 1) + 1)
    for k in range(1, kmax + 1):
        if qp.field.q ** (qp.n * k) > 10 ** 7 or qp.field.q ** (out.n * k) > 10 ** 7:
            break
        assert _normalized_hist(qp, k) == _normalized_hist(out, k), k


def test_reduce_examples():
    jf = reduce_standard(QuadPoly.from_ints(Z2, 9, [[1]], [1]))   # x^2 + x
    assert jf.blocks == () and jf.lam == 1 and jf.c.is_zero()
    check_isospectral(QuadPoly.from_ints(Z2, 9, [[1]], [1]), jf, 5)

    jf = reduce_standard(QuadPoly.from_ints(F5, 9, [[1]], [2]))   # x^2 + 2x
    assert jf.lam is None and jf.blocks[0][1] == sq(F5, 1)
    assert valuation(jf.c) == 0 and eta(jf.c.reduce_to(1) * (-F5.one(1))) == 1
    check_isospectral(QuadPoly.from_ints(F5, 9, [[1]], [2]), jf, 4)

    qp = QuadPoly.from_ints(F3, 9, [[0, 2], [2, 0]], [1, 0])      # xy + x
    jf = reduce_standard(qp)
    assert jf.blocks[0][1] == UnimodularClass.hyp(F3) and jf.lam is None
    check_isospectral(qp, jf, 4)


def test_reduce_corpus_strong_isospectrality():
    cases = [
        (F3, [[1, 0], [0, 3]], [1, 9], 2),
        (F3, [[0, 2], [2, 0]], [3, 3], 1),
        (F3, [[1, 1], [1, 1]], [0, 1], 0),       # degenerate quadratic part
        (F5, [[5, 0], [0, 1]], [1, 0], 3),
        (F5, [[1]], [10], 7),
        (Z2, [[1, 0], [0, 2]], [2, 4], 1),
        (Z2, [[2, 1], [1, 2]], [2, 2], 3),        # elliptic plane with linear
        (Z2, [[0, 1], [1, 0]], [0, 4], 5),        # hyperbolic with linear
        (Z2, [[4]], [2], 3),                      # linear dominates the square
        (Z2, [[1]], [2], 0),                      # completed square, constant
    ]
    for field, mat, lin, const in cases:
        qp = QuadPoly.from_ints(field, 10, mat, lin, const)
        jf = reduce_standard(qp)
        assert jf.is_standard()
        check_isospectral(qp, jf, 5 if field.p == 2 else 4)


def test_reduce_refusals():
    qp = QuadPoly.from_ints(F4, 8, [[1]], [1])
    with pytest.raises(UnsupportedReduction):
        reduce_standard(qp)
    # disjoint variables are fine at f >= 2
    qp = QuadPoly.from_ints(F4, 8, [[1, 0], [0, 0]], [0, 2])
    jf = reduce_standard(qp)
    assert jf.lam == 1 and jf.blocks[0][1] == sq(F4, 1)


def test_precision_errors():
    with pytest.raises(PrecisionError):
        jordan_decompose(QuadPoly.from_ints(Z2, 3, [[4]]))
    with pytest.raises(PrecisionError):
        jordan_decompose(QuadPoly.from_ints(Z2, 4, [[0, 4], [4, 0]]))
    # entries invisible at the working precision are zero blocks by the
    # caller's precision-sufficiency precondition
    blocks, _, prim = jordan_decompose(QuadPoly.from_ints(F3, 2, [[9]]))
    assert blocks == [] and prim[0][1] == "zero"


def test_folded_accessor_matches_direct_classification():
    from padiczeta.genfun import modular_gf
    blocks = [(0, sq(Z2, 3)), (2, UnimodularClass.hyp(Z2))]
    jf = JordanForm.make(Z2, blocks)
    folded = jf.folded(2)
    direct = classify_unimodular(
        Z2, _assemble(Z2, [sq(Z2, 3).matrix(6), UnimodularClass.hyp(Z2).matrix(6)], 6))
    assert modular_gf(folded.quadpoly(3), 3) == modular_gf(direct.quadpoly(3), 3)
    assert jf.folded(1).is_zero() and jf.folded_rank(2) == 3
    assert jf.q_weight(2) == Z2.q ** (jf.folded_rank(0) + jf.folded_rank(1))


def test_canonical_square_coeff_examples():
    assert canonical_square_coeff(Z2, (7,)) == (7,)
    assert canonical_square_coeff(Z2, (9,)) == (1,)   # 9 = 3^2
    assert canonical_square_coeff(F3, (2,)) == (2,)
    assert canonical_square_coeff(F5, (4,)) == (1,)
