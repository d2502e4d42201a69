"""Quadratic polynomials over R/pi^k: Jordan decomposition, classification of
unimodular forms, addition rules, and reduction to the standard shape

    (+) pi^i Q_i  (+)  pi^lambda * x  +  c

with each Q_i unimodular and lambda larger than every block exponent.

Unimodular classes are stored in table shape: a number of hyperbolic planes,
at most one elliptic plane, and canonical square coefficients (for p = 2 these
are units = 1 mod 2, reduced to a canonical representative mod 8; for odd p
they are 1 or the fixed nonsquare).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .fields import (
    FieldDesc,
    RingElem,
    eta,
    is_square_unit,
    pick_nonsquare,
    pick_xi,
    valuation,
)

__all__ = [
    "QuadPoly",
    "UnimodularClass",
    "JordanForm",
    "PrecisionError",
    "UnsupportedReduction",
    "jordan_decompose",
    "classify_unimodular",
    "add_forms",
    "reduce_standard",
    "invariants",
    "canonical_square_coeff",
    "square_class_reps",
]


class PrecisionError(ValueError):
    pass


class UnsupportedReduction(ValueError):
    pass


# -- exact coefficient-tuple helpers (elements of Z[x]/(modulus), no p^k) -------


def _tup_mul(field: FieldDesc, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return field._mul_tuples(tuple(a), tuple(b))


def _tup_mod(field: FieldDesc, a: Sequence[int], modulus: int) -> tuple[int, ...]:
    return tuple(c % modulus for c in a)


def _tup_enc(a: Sequence[int], base: int) -> int:
    return sum((c % base) * base ** i for i, c in enumerate(a))


@lru_cache(maxsize=None)
def _unit_squares_mod8(field: FieldDesc) -> tuple[tuple[int, ...], ...]:
    out = {(u * u).coeffs for u in field.all_elems(3) if u.is_unit()}
    return tuple(sorted(out, key=lambda t: _tup_enc(t, 8)))


@lru_cache(maxsize=None)
def _all_squares_mod8(field: FieldDesc) -> tuple[tuple[int, ...], ...]:
    out = {(u * u).coeffs for u in field.all_elems(3)}
    return tuple(sorted(out, key=lambda t: _tup_enc(t, 8)))


def canonical_square_coeff(field: FieldDesc, a: RingElem | Sequence[int]) -> tuple[int, ...]:
    """Canonical representative of the square class of the unit a.

    Odd p: (1, 0, ...) or the fixed nonsquare's residue tuple.  p = 2: the
    least (by base-8 encoding) element of a's square class mod 8 that reduces
    to 1 in the residue field.
    """
    if isinstance(a, RingElem):
        elem = a
    else:
        elem = field.elem(tuple(a), 3 if field.p == 2 else 1)
    if not elem.is_unit():
        raise ValueError("square coefficients must be units")
    if field.p != 2:
        if eta(elem) == 1:
            return (1,) + (0,) * (field.f - 1)
        return pick_nonsquare(field, 1).coeffs
    a8 = elem.reduce_to(3)
    one_res = field.one(1)
    best = None
    for s in _unit_squares_mod8(field):
        cand = _tup_mod(field, _tup_mul(field, a8.coeffs, s), 8)
        if field.elem(cand, 1) == one_res:
            code = _tup_enc(cand, 8)
            if best is None or code < best[0]:
                best = (code, cand)
    assert best is not None
    return best[1]


@lru_cache(maxsize=None)
def square_class_reps(field: FieldDesc) -> tuple[tuple[int, ...], ...]:
    """All canonical square-class representatives of units (= 1 mod 2 when p = 2)."""
    if field.p != 2:
        return ((1,) + (0,) * (field.f - 1), pick_nonsquare(field, 1).coeffs)
    reps = {canonical_square_coeff(field, u)
            for u in field.all_elems(3)
            if u.is_unit() and field.elem(u.coeffs, 1) == field.one(1)}
    return tuple(sorted(reps, key=lambda t: _tup_enc(t, 8)))


@lru_cache(maxsize=None)
def nonsquare_unit_scale(field: FieldDesc) -> tuple[int, ...]:
    """Exact lift of 1 + 4*xi (p = 2); multiplication by it flips a square class."""
    xi = pick_xi(field, 3)
    one_plus = field.elem(1, 3) + field.elem([4 * c for c in xi.coeffs], 3)
    return one_plus.coeffs


# -- QuadPoly -------------------------------------------------------------------


class QuadPoly:
    """Q(x) = x M x^T + b . x + c with M symmetric over R/pi^k."""

    __slots__ = ("field", "n", "k", "M", "b", "c")

    def __init__(self, field: FieldDesc, M: Sequence[Sequence[RingElem]],
                 b: Sequence[RingElem] | None = None, c: RingElem | None = None):
        self.field = field
        self.n = len(M)
        rows = tuple(tuple(row) for row in M)
        ks = {e.k for row in rows for e in row}
        if b:
            ks |= {e.k for e in b}
        if c is not None:
            ks.add(c.k)
        if len(ks) > 1:
            raise ValueError("all coefficients must share one precision")
        self.k = ks.pop() if ks else 1
        for i in range(self.n):
            for j in range(self.n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("matrix must be symmetric")
        self.M = rows
        self.b = tuple(b) if b else tuple(field.zero(self.k) for _ in range(self.n))
        self.c = c if c is not None else field.zero(self.k)

    @staticmethod
    def from_ints(field: FieldDesc, k: int, matrix: Sequence[Sequence] = (),
                  linear: Sequence = (), constant=0) -> "QuadPoly":
        def elem(v):
            return field.elem(v if isinstance(v, (list, tuple)) else int(v), k)

        n = max(len(matrix), len(linear))
        M = [[field.zero(k) for _ in range(n)] for _ in range(n)]
        for i, row in enumerate(matrix):
            for j, v in enumerate(row):
                M[i][j] = elem(v)
        b = [elem(linear[i]) if i < len(linear) else field.zero(k) for i in range(n)]
        return QuadPoly(field, M, b, elem(constant))

    def evaluate(self, point: Sequence[RingElem]) -> RingElem:
        acc = self.c
        for i in range(self.n):
            row = self.M[i]
            for j in range(self.n):
                acc = acc + row[j] * point[i] * point[j]
            acc = acc + self.b[i] * point[i]
        return acc

    def gradient(self, point: Sequence[RingElem]) -> list[RingElem]:
        two = self.field.elem(2, self.k)
        out = []
        for i in range(self.n):
            g = self.b[i]
            for j in range(self.n):
                g = g + two * self.M[i][j] * point[j]
            out.append(g)
        return out

    def quadratic_part(self) -> "QuadPoly":
        return QuadPoly(self.field, self.M)

    def reduce_to(self, k: int) -> "QuadPoly":
        return QuadPoly(self.field,
                        [[e.reduce_to(k) for e in row] for row in self.M],
                        [e.reduce_to(k) for e in self.b],
                        self.c.reduce_to(k))

    def variable_blocks(self) -> list[tuple[int, ...]]:
        """Connected components of variables under the off-diagonal pattern of M."""
        parent = list(range(self.n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(self.n):
            for j in range(i + 1, self.n):
                if not self.M[i][j].is_zero():
                    parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(self.n):
            groups.setdefault(find(i), []).append(i)
        return [tuple(v) for v in sorted(groups.values())]


# -- UnimodularClass --------------------------------------------------------------


@dataclass(frozen=True)
class UnimodularClass:
    """A unimodular form in table shape: Sq coefficients + elliptic + hyperbolics."""

    field: FieldDesc
    hyp_count: int = 0
    has_ell: bool = False
    square_coeffs: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.field.p != 2:
            if len(self.square_coeffs) > 1:
                raise ValueError("odd p stores at most one square coefficient")
            if self.square_coeffs and self.has_ell:
                raise ValueError("odd p odd-rank shapes carry no elliptic plane")
        else:
            if len(self.square_coeffs) > 2:
                raise ValueError("p = 2 stores at most two square coefficients")

    @staticmethod
    def zero(field: FieldDesc) -> "UnimodularClass":
        return UnimodularClass(field)

    @staticmethod
    def sq(field: FieldDesc, a=1) -> "UnimodularClass":
        coeff = tuple(a) if isinstance(a, (tuple, list)) else (int(a),) + (0,) * (field.f - 1)
        return UnimodularClass(field, 0, False, (canonical_square_coeff(field, coeff),))

    @staticmethod
    def hyp(field: FieldDesc, count: int = 1) -> "UnimodularClass":
        return UnimodularClass(field, count, False, ())

    @staticmethod
    def ell(field: FieldDesc, extra_hyp: int = 0) -> "UnimodularClass":
        return UnimodularClass(field, extra_hyp, True, ())

    @property
    def rank(self) -> int:
        return 2 * self.hyp_count + 2 * int(self.has_ell) + len(self.square_coeffs)

    def is_zero(self) -> bool:
        return self.rank == 0

    def norm_code(self) -> str:
        """'R', '2R', or '0'; for odd p the ideal 2R is R itself."""
        if self.square_coeffs:
            return "R"
        if self.rank == 0:
            return "0"
        return "2R" if self.field.p == 2 else "R"

    def disc_tuple(self) -> tuple[int, ...]:
        """Exact integer-tuple representative of the discriminant square class."""
        f = self.field
        acc = (1,) + (0,) * (f.f - 1)
        for _ in range(self.hyp_count):
            acc = tuple(-c for c in acc)
        if self.has_ell:
            scale = nonsquare_unit_scale(f) if f.p == 2 else pick_nonsquare(f, 1).coeffs
            acc = tuple(-c for c in _tup_mul(f, acc, scale))
        for s in self.square_coeffs:
            acc = _tup_mul(f, acc, s)
        return acc

    def disc_elem(self, k: int) -> RingElem:
        return self.field.elem(self.disc_tuple(), k)

    def matrix(self, k: int) -> list[list[RingElem]]:
        """A symmetric matrix realizing the class (canonical shape blocks)."""
        f = self.field
        blocks: list[list[list[RingElem]]] = []
        for s in self.square_coeffs:
            blocks.append([[f.elem(s, k)]])
        if self.has_ell:
            if f.p == 2:
                xi = pick_xi(f, k)
                blocks.append([[f.elem(2, k), f.one(k)],
                               [f.one(k), f.elem(2, k) * xi]])
            else:
                alpha = pick_nonsquare(f, k)
                blocks.append([[f.one(k), f.zero(k)],
                               [f.zero(k), -alpha]])
        for _ in range(self.hyp_count):
            blocks.append([[f.zero(k), f.one(k)],
                           [f.one(k), f.zero(k)]])
        n = sum(len(bl) for bl in blocks)
        M = [[f.zero(k) for _ in range(n)] for _ in range(n)]
        off = 0
        for bl in blocks:
            m = len(bl)
            for i in range(m):
                for j in range(m):
                    M[off + i][off + j] = bl[i][j]
            off += m
        return M

    def quadpoly(self, k: int) -> QuadPoly:
        return QuadPoly(self.field, self.matrix(k))

    def oracle_block_polys(self, k: int) -> list[QuadPoly]:
        """Counting-friendly <=2-variable direct summands of an equivalent form.

        Over odd p every class has a diagonal representative, which keeps the
        counting oracle on 1-variable blocks; over p = 2 the planes are genuine
        2-variable blocks.
        """
        f = self.field
        out = [QuadPoly(f, [[f.elem(s, k)]]) for s in self.square_coeffs]
        if f.p != 2:
            alpha = pick_nonsquare(f, k)
            for _ in range(self.hyp_count):
                out.append(QuadPoly(f, [[f.one(k)]]))
                out.append(QuadPoly(f, [[-f.one(k)]]))
            if self.has_ell:
                out.append(QuadPoly(f, [[f.one(k)]]))
                out.append(QuadPoly(f, [[-alpha]]))
        else:
            for _ in range(self.hyp_count):
                out.append(QuadPoly(f, [[f.zero(k), f.one(k)],
                                        [f.one(k), f.zero(k)]]))
            if self.has_ell:
                xi = pick_xi(f, k)
                out.append(QuadPoly(f, [[f.elem(2, k), f.one(k)],
                                        [f.one(k), f.elem(2, k) * xi]]))
        return out

    def render(self) -> str:
        parts = []
        for s in self.square_coeffs:
            if self.field.f == 1:
                parts.append(f"Sq({s[0]})")
            else:
                body = "+".join((f"{c}*x^{i}" if i > 1 else (f"{c}*x" if i else str(c)))
                                for i, c in enumerate(s) if c)
                parts.append(f"Sq({body or '0'})")
        if self.has_ell:
            parts.append("Ell")
        if self.hyp_count:
            parts.append("Hyp" if self.hyp_count == 1 else f"Hyp^{self.hyp_count}")
        return " + ".join(parts) if parts else "0"


def invariants(u: UnimodularClass) -> tuple[int, tuple[int, ...], str]:
    """(rank, discriminant class representative, norm ideal code)."""
    return u.rank, u.disc_tuple(), u.norm_code()


# -- addition rules ----------------------------------------------------------------


def _three_square_rule(field: FieldDesc, a: tuple[int, ...], b: tuple[int, ...],
                       c: tuple[int, ...]) -> tuple[tuple[int, ...], str]:
    """Fold aSq + bSq + cSq (p = 2): (-abc)Sq + Hyp when a r^2 + b s^2 + c t^2
    represents -abc mod 8, else (-abc)(1+4 xi)Sq + Ell."""
    abc = _tup_mod(field, _tup_mul(field, _tup_mul(field, a, b), c), 8)
    target = tuple((-x) % 8 for x in abc)
    sq8 = _all_squares_mod8(field)
    aset = {_tup_mod(field, _tup_mul(field, a, s), 8) for s in sq8}
    bset = {_tup_mod(field, _tup_mul(field, b, s), 8) for s in sq8}
    cset = {_tup_mod(field, _tup_mul(field, c, s), 8) for s in sq8}
    for u in aset:
        for v in bset:
            w = tuple((t - x - y) % 8 for t, x, y in zip(target, u, v))
            if w in cset:
                return canonical_square_coeff(field, target), "hyp"
    d = _tup_mod(field, _tup_mul(field, target, nonsquare_unit_scale(field)), 8)
    return canonical_square_coeff(field, d), "ell"


def _canonical_fold(field: FieldDesc, hyp: int, ell: int,
                    squares: list[tuple[int, ...]]) -> UnimodularClass:
    if field.p != 2:
        rank = 2 * hyp + 2 * ell + len(squares)
        if rank == 0:
            return UnimodularClass.zero(field)
        disc = (1,) + (0,) * (field.f - 1)
        for _ in range(ell):
            disc = tuple(-x for x in _tup_mul(field, disc, pick_nonsquare(field, 1).coeffs))
        for _ in range(hyp):
            disc = tuple(-x for x in disc)
        for s in squares:
            disc = _tup_mul(field, disc, s)
        d = field.elem(disc, 1)
        if rank % 2:
            sign = (-field.one(1)) ** ((rank - 1) // 2)
            a = ((1,) + (0,) * (field.f - 1)) if eta(d * sign) == 1 \
                else pick_nonsquare(field, 1).coeffs
            return UnimodularClass(field, (rank - 1) // 2, False, (a,))
        sign = (-field.one(1)) ** (rank // 2)
        if eta(d * sign) == 1:
            return UnimodularClass(field, rank // 2, False, ())
        return UnimodularClass(field, (rank - 2) // 2, True, ())
    squares = sorted((canonical_square_coeff(field, s) for s in squares),
                     key=lambda t: _tup_enc(t, 8))
    while ell >= 2:
        ell -= 2
        hyp += 2
    while len(squares) >= 3:
        a, b, c = squares[:3]
        d, plane = _three_square_rule(field, a, b, c)
        squares = sorted([d] + squares[3:], key=lambda t: _tup_enc(t, 8))
        if plane == "hyp":
            hyp += 1
        else:
            ell += 1
        while ell >= 2:
            ell -= 2
            hyp += 2
    return UnimodularClass(field, hyp, bool(ell), tuple(squares))


def add_forms(u1: UnimodularClass, u2: UnimodularClass) -> UnimodularClass:
    """Direct sum of unimodular classes, folded back into table shape."""
    if u1.field != u2.field:
        raise ValueError("mixed ground rings")
    return _canonical_fold(
        u1.field,
        u1.hyp_count + u2.hyp_count,
        int(u1.has_ell) + int(u2.has_ell),
        list(u1.square_coeffs) + list(u2.square_coeffs),
    )


# -- Jordan decomposition ------------------------------------------------------------


def _finite_val(e: RingElem) -> int | None:
    v = valuation(e)
    if v.is_infinite or v.is_floor:
        return None
    return v.value


def _min_valuation(entries) -> int | None:
    vals = [v for v in (_finite_val(e) for e in entries) if v is not None]
    return min(vals) if vals else None


def jordan_decompose(qp: QuadPoly):
    """Split the quadratic part into pi^i-scaled unimodular blocks.

    Returns (blocks, basis, primitives): blocks is the folded sorted
    [(exponent, UnimodularClass)] list; basis B satisfies B^T M B = block
    matrix at the final working precision; primitives records each pivot with
    its variables (for the standard-form reduction, which tracks summands).

    Odd p always pivots on the diagonal (an off-diagonal minimum is first
    folded onto the diagonal, 2 being a unit).  For p = 2 the diagonal is used
    only when its minimum valuation does not exceed the off-diagonal minimum;
    otherwise a 2x2 plane block is split off.  Every pivot at valuation v
    spends v (or 2v for a plane) units of precision; blocks must remain
    certifiable at precision >= 3 for p = 2 (mod-8 square classes) and >= 1
    for odd p, else PrecisionError.

    A remaining submatrix that vanishes at the working precision is taken to
    be exactly zero: under the precision precondition (k at least v(det) plus
    the certification margin) any true block would still be visible there.
    """
    field, n = qp.field, qp.n
    cur = {"k": qp.k}
    M = [list(row) for row in qp.M]
    basis = [[field.one(qp.k) if i == j else field.zero(qp.k) for j in range(n)]
             for i in range(n)]
    active = list(range(n))
    primitives = []  # (exponent, kind, payload, variables)

    def reduce_all(kw: int):
        if kw == cur["k"]:
            return
        for r in range(n):
            for s in range(n):
                M[r][s] = M[r][s].reduce_to(kw)
                basis[r][s] = basis[r][s].reduce_to(kw)
        cur["k"] = kw

    def col_addmul(dst: int, src: int, factor: RingElem):
        for r in range(n):
            M[r][dst] = M[r][dst] + factor * M[r][src]
        for r in range(n):
            M[dst][r] = M[dst][r] + factor * M[src][r]
        for r in range(n):
            basis[r][dst] = basis[r][dst] + factor * basis[r][src]

    min_block_prec = 3 if field.p == 2 else 1

    while active:
        vmin = _min_valuation(M[i][j] for i in active for j in active)
        if vmin is None:
            for i in active:
                primitives.append((None, "zero", None, (i,)))
            break
        off_pairs = [(i, j) for ai, i in enumerate(active) for j in active[ai + 1:]]
        vd = _min_valuation(M[i][i] for i in active)
        vo = _min_valuation(M[i][j] for i, j in off_pairs) if off_pairs else None

        use_diag = vd is not None and (vo is None or vd <= vo)
        if field.p != 2 and not use_diag:
            i, j = next((i, j) for i, j in off_pairs if _finite_val(M[i][j]) == vo)
            col_addmul(i, j, field.one(cur["k"]))
            use_diag = True
            vd = _min_valuation(M[i][i] for i in active)

        if use_diag:
            piv = next(i for i in active if _finite_val(M[i][i]) == vd)
            kw = cur["k"] - vd
            if kw < min_block_prec:
                raise PrecisionError("insufficient precision to certify a pivot block")
            unit = M[piv][piv].divide_by_pi(vd)
            inv = unit.inverse()
            factors = {}
            for j in active:
                if j != piv and not M[piv][j].is_zero():
                    factors[j] = M[piv][j].divide_by_pi(vd) * inv
            reduce_all(kw)
            for j, factor in factors.items():
                col_addmul(j, piv, -factor)
            primitives.append((vd, "sq", unit, (piv,)))
            active.remove(piv)
        else:
            i, j = next((i, j) for i, j in off_pairs if _finite_val(M[i][j]) == vo)
            g11, g12, g22 = M[i][i], M[i][j], M[j][j]
            kw = cur["k"] - 2 * vo
            if kw < min_block_prec:
                raise PrecisionError("insufficient precision to certify a plane block")
            det = g11 * g22 - g12 * g12
            if _finite_val(det) != 2 * vo:
                raise PrecisionError("plane pivot determinant not certified")
            det0 = det.divide_by_pi(2 * vo)
            det_inv = det0.inverse()
            coeffs = {}
            for s in active:
                if s in (i, j):
                    continue
                r0, r1 = M[s][i], M[s][j]
                if r0.is_zero() and r1.is_zero():
                    continue
                alpha = (r0 * g22 - r1 * g12).divide_by_pi(2 * vo) * det_inv
                beta = (r1 * g11 - r0 * g12).divide_by_pi(2 * vo) * det_inv
                coeffs[s] = (alpha, beta)
            block = ((g11.divide_by_pi(vo), g12.divide_by_pi(vo)),
                     (g12.divide_by_pi(vo), g22.divide_by_pi(vo)))
            reduce_all(kw)
            for s, (alpha, beta) in coeffs.items():
                col_addmul(s, i, -alpha)
                col_addmul(s, j, -beta)
            primitives.append((vo, "plane", block, (i, j)))
            active.remove(i)
            active.remove(j)

    blocks = _fold_primitives(field, primitives)
    return blocks, basis, primitives


def _classify_plane(field: FieldDesc, block) -> UnimodularClass:
    """2x2 unimodular with non-unit diagonal (p = 2): hyperbolic or elliptic by -det."""
    (g11, g12), (_, g22) = block
    det = g11 * g22 - g12 * g12
    if is_square_unit(-det):
        return UnimodularClass.hyp(field)
    scaled = -det * field.elem(nonsquare_unit_scale(field), det.k)
    if not is_square_unit(scaled):
        raise ValueError("plane block is not unimodular of norm 2R")
    return UnimodularClass.ell(field)


def _fold_primitives(field: FieldDesc, primitives) -> list[tuple[int, UnimodularClass]]:
    per_exp: dict[int, UnimodularClass] = {}
    for expo, kind, payload, _vars in primitives:
        if kind == "zero":
            continue
        if kind == "sq":
            cls = UnimodularClass(field, 0, False, (canonical_square_coeff(field, payload),))
        else:
            cls = _classify_plane(field, payload)
        per_exp[expo] = add_forms(per_exp[expo], cls) if expo in per_exp else cls
    return sorted(per_exp.items())


def classify_unimodular(field: FieldDesc, matrix: Sequence[Sequence[RingElem]]) -> UnimodularClass:
    """Table shape of a unimodular symmetric matrix."""
    qp = QuadPoly(field, matrix)
    if qp.n == 0:
        return UnimodularClass.zero(field)
    blocks, _, _ = jordan_decompose(qp)
    if len(blocks) != 1 or blocks[0][0] != 0 or blocks[0][1].rank != qp.n:
        raise ValueError("matrix is not unimodular")
    return blocks[0][1]


# -- JordanForm -----------------------------------------------------------------------


@dataclass(frozen=True)
class JordanForm:
    """Standard-form data: blocks (+) pi^lambda x + c, lambda above every exponent."""

    field: FieldDesc
    blocks: tuple[tuple[int, UnimodularClass], ...] = ()
    lam: int | None = None  # None encodes +infinity (no linear part)
    c: RingElem | None = None
    audit: tuple[str, ...] = ()

    def __post_init__(self):
        exps = [i for i, _ in self.blocks]
        if len(set(exps)) != len(exps) or exps != sorted(exps):
            raise ValueError("blocks need distinct ascending exponents")
        if any(q.is_zero() for _, q in self.blocks):
            raise ValueError("zero blocks are omitted")

    @staticmethod
    def make(field: FieldDesc, blocks=(), lam: int | None = None, c=0,
             c_precision: int = 12) -> "JordanForm":
        const = c if isinstance(c, RingElem) else field.elem(c, c_precision)
        if const.is_zero() and not isinstance(c, RingElem):
            const = const.declare_exact_zero()
        cleaned = tuple((int(i), q) for i, q in blocks if not q.is_zero())
        return JordanForm(field, cleaned, lam, const)

    @property
    def omega(self) -> int:
        """Least positive omega with every nonzero block exponent <= omega."""
        return max([1] + [i for i, _ in self.blocks])

    @property
    def total_rank(self) -> int:
        return sum(q.rank for _, q in self.blocks)

    def block_at(self, i: int) -> UnimodularClass:
        for e, q in self.blocks:
            if e == i:
                return q
        return UnimodularClass.zero(self.field)

    def folded(self, j: int) -> UnimodularClass:
        """Q_(j): table-shape direct sum of Q_i over i <= j with i = j mod 2."""
        acc = UnimodularClass.zero(self.field)
        for i, q in self.blocks:
            if i <= j and (i - j) % 2 == 0:
                acc = add_forms(acc, q)
        return acc

    def folded_rank(self, j: int) -> int:
        return sum(q.rank for i, q in self.blocks if i <= j and (i - j) % 2 == 0)

    def q_weight(self, j: int) -> int:
        """q_(j) = q^(sum over i < j of the folded rank at i)."""
        return self.field.q ** sum(self.folded_rank(i) for i in range(j))

    def is_standard(self) -> bool:
        return self.lam is None or self.lam > max([i for i, _ in self.blocks], default=-1)

    def standard_poly(self, k: int) -> QuadPoly:
        """The polynomial (+) pi^i Q_i (+) pi^lambda x + c at precision k."""
        f = self.field
        mats = []
        for i, q in self.blocks:
            scale = f.elem(f.p ** i, k)
            mats.append([[scale * e for e in row] for row in q.matrix(k)])
        n = sum(len(m) for m in mats) + (1 if self.lam is not None else 0)
        M = [[f.zero(k) for _ in range(n)] for _ in range(n)]
        off = 0
        for m in mats:
            for a in range(len(m)):
                for b in range(len(m)):
                    M[off + a][off + b] = m[a][b]
            off += len(m)
        b = [f.zero(k) for _ in range(n)]
        if self.lam is not None:
            if self.lam >= k:
                raise PrecisionError("lambda at or above requested precision")
            b[off] = f.elem(f.p ** self.lam, k)
        c = self.c if self.c is not None else f.zero(k, exact=True)
        if c.k < k:
            raise PrecisionError("constant carried at lower precision than requested")
        return QuadPoly(f, M, b, c.reduce_to(k))

    def counting_poly(self, k: int) -> QuadPoly:
        """An equivalent polynomial assembled from counting-friendly block
        representatives: over odd p the planes are realized diagonally, so
        every quadratic block has one variable; over p = 2 the planes are the
        genuine 2-variable shapes.  Same value histogram at every level as
        standard_poly (the representatives are equivalent forms)."""
        f = self.field
        mats: list[list[list[RingElem]]] = []
        for i, q in self.blocks:
            scale = f.elem(f.p ** i, k)
            for block in q.oracle_block_polys(k):
                mats.append([[scale * e for e in row] for row in block.M])
        n = sum(len(m) for m in mats) + (1 if self.lam is not None else 0)
        M = [[f.zero(k) for _ in range(n)] for _ in range(n)]
        off = 0
        for m in mats:
            for a in range(len(m)):
                for b in range(len(m)):
                    M[off + a][off + b] = m[a][b]
            off += len(m)
        b = [f.zero(k) for _ in range(n)]
        if self.lam is not None:
            if self.lam >= k:
                raise PrecisionError("lambda at or above requested precision")
            b[off] = f.elem(f.p ** self.lam, k)
        c = self.c if self.c is not None else f.zero(k, exact=True)
        if c.k < k:
            raise PrecisionError("constant carried at lower precision than requested")
        return QuadPoly(f, M, b, c.reduce_to(k))

    def render(self) -> str:
        parts = [f"{q.render()} @ pi^{i}" if i else q.render() for i, q in self.blocks]
        if self.lam is not None:
            parts.append(f"pi^{self.lam}*x" if self.lam else "x")
        if self.c is not None and not self.c.is_zero():
            parts.append(f"c={self.c!r}")
        return "  (+)  ".join(parts) if parts else "0"


# -- reduction to standard form ----------------------------------------------------


def reduce_standard(qp: QuadPoly) -> JordanForm:
    """Strongly isospectral standard form of a quadratic polynomial.

    Requires p odd, or f = 1, whenever a variable is shared between the linear
    and quadratic parts; the unramified f >= 2 mixed case is refused.  Every
    rewrite is one of: completing the square / an integral translation on a
    plane block (when the linear coefficients are divisible enough), dropping
    a block dominated by its own linear term, the rank-1 tied case over Z_2
    (a x^2 + b x with v(a) = v(b) becomes 2 b x), and finally merging all
    surviving linear variables into one and dropping quadratic blocks at or
    above its valuation.
    """
    field = qp.field
    ell = field.ell
    audit: list[str] = []

    blocks_unused, basis, primitives = jordan_decompose(qp.quadratic_part())
    kw = min([e.k for row in basis for e in row] + [qp.k])
    b_new = []
    for j in range(qp.n):
        acc = field.zero(kw)
        for i in range(qp.n):
            acc = acc + qp.b[i].reduce_to(kw) * basis[i][j].reduce_to(kw)
        b_new.append(acc)
    const = qp.c.reduce_to(kw)

    mixed = any(
        kind != "zero" and any(not b_new[v].is_zero() for v in vars_)
        for _, kind, _, vars_ in primitives
    )
    if mixed and field.p == 2 and field.f >= 2:
        raise UnsupportedReduction(
            "p = 2 with f >= 2 and a variable shared by linear and quadratic parts")

    unit4 = 4 // 2 ** (2 * ell)  # the unit part of 4 = pi^(2*ell) * unit4
    kept: list[tuple[int, UnimodularClass]] = []
    linear_pool: list[RingElem] = []

    for expo, kind, payload, vars_ in primitives:
        if kind == "zero":
            for v in vars_:
                if not b_new[v].is_zero():
                    linear_pool.append(b_new[v])
            continue
        lin = [b_new[v] for v in vars_]
        if all(e.is_zero() for e in lin):
            cls = (UnimodularClass(field, 0, False, (canonical_square_coeff(field, payload),))
                   if kind == "sq" else _classify_plane(field, payload))
            kept.append((expo, cls))
            continue
        vals = [_finite_val(e) for e in lin]
        if all(v is None for v in vals):
            raise PrecisionError("cannot certify the valuation of a linear coefficient")
        vmin = min(v for v in vals if v is not None)
        if kind == "sq":
            bcoef = lin[0]
            if vmin >= expo + ell:
                u = payload
                num = (bcoef * bcoef).divide_by_pi(2 * ell + expo)
                delta = num * (field.elem(unit4, num.k) * u.reduce_to(num.k)).inverse()
                const = const.reduce_to(delta.k) - delta
                kept.append((expo, UnimodularClass(field, 0, False,
                                                   (canonical_square_coeff(field, payload),))))
                audit.append(f"var {vars_[0]}: completed the square")
            elif vmin < expo:
                linear_pool.append(bcoef)
                audit.append(f"var {vars_[0]}: linear term dominates, square block dropped")
            else:
                # vmin == expo, only reachable when p = 2; valid over Z_2 alone
                if field.f >= 2:
                    raise UnsupportedReduction(
                        "tied rank-1 valuation case is only reduced over Z_2")
                linear_pool.append(field.elem(2, bcoef.k) * bcoef)
                audit.append(f"var {vars_[0]}: tied valuations, rewritten as doubled linear")
        else:
            (g11, g12), (_, g22) = payload
            if vmin >= expo + ell:
                kb = min(payload[0][0].k, lin[0].k)
                scale = field.elem(field.p ** expo, kb)
                g11, g12, g22 = g11.reduce_to(kb), g12.reduce_to(kb), g22.reduce_to(kb)
                G11, G12, G22 = scale * g11, scale * g12, scale * g22
                a1, a2 = lin[0].reduce_to(kb), lin[1].reduce_to(kb)
                num = (a1 * (a1 * G22 - a2 * G12) + a2 * (a2 * G11 - a1 * G12))
                det0 = (G11 * G22 - G12 * G12).divide_by_pi(2 * expo)
                num = num.divide_by_pi(2 * expo + 2 * ell)
                delta = num * (field.elem(unit4, num.k) * det0.reduce_to(num.k)).inverse()
                const = const.reduce_to(delta.k) - delta
                kept.append((expo, _classify_plane(field, payload)))
                audit.append(f"vars {vars_}: plane kept, linear absorbed by translation")
            else:
                idx = vals.index(vmin)
                linear_pool.append(lin[idx])
                audit.append(f"vars {vars_}: linear term dominates the plane, block dropped")

    lam: int | None = None
    if linear_pool:
        vs = [_finite_val(e) for e in linear_pool]
        if any(v is None for v in vs):
            raise PrecisionError("cannot certify the valuation of a linear coefficient")
        lam = min(vs)
        audit.append(f"linear variables merged, lambda = {lam}")
        dropped = [i for i, _ in kept if i >= lam]
        if dropped:
            audit.append(f"blocks at exponents {dropped} dominated by the linear part, dropped")
        kept = [(i, q) for i, q in kept if i < lam]

    per_exp: dict[int, UnimodularClass] = {}
    for i, q in kept:
        per_exp[i] = add_forms(per_exp[i], q) if i in per_exp else q
    blocks_final = tuple(sorted(per_exp.items()))

    c_out = const
    if c_out.is_zero() and qp.c.is_zero() and qp.c.exact_zero:
        c_out = c_out.declare_exact_zero()
    return JordanForm(field, blocks_final, lam, c_out, tuple(audit))
