"""Symbolic p-adic generating functions.

Two concrete fragments of the projective-limit algebra are implemented:

* ModularGF -- the level-k histogram of a polynomial's values, normalized to
  total mass 1, living in the group algebra of R/pi^k.
* CosetCombination -- a finite rational combination of terms z^A where A is a
  coset a + pi^j R (or a singleton {a}, level infinity).  Products follow
  z^A z^B = z^(A+B); coalescence rewrites a full equal-weight tiling of a
  coarser coset as a single term.

The Ig map sends either fragment to the zeta side exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import encoding as enc
from .fields import FieldDesc, RingElem, eta, teichmuller_set, trace_parity, trace_zero_teichmullers
from .quadform import QuadPoly, UnimodularClass
from .ratfunc import Poly, RationalFunction, geometric_unit_ball

__all__ = [
    "CosetTerm",
    "CosetCombination",
    "ModularGF",
    "modular_gf",
    "gr_mul",
    "coset_mul",
    "head_unimodular",
    "hensel_head",
    "truncated_gf",
    "assemble_gf",
    "AssembledGF",
    "ig_truncated",
    "closed_form_head",
    "SIZE_GUARD",
]

SIZE_GUARD = 10 ** 8

INF = None  # singleton level marker


def _tuple_val(field: FieldDesc, rep: Sequence[int]) -> int | None:
    """Exact valuation of an integer-tuple lift; None means the zero tuple."""
    if not any(rep):
        return INF
    v = 0
    while all(c % field.p ** (v + 1) == 0 for c in rep):
        v += 1
    return v


def _reduce_rep(field: FieldDesc, rep: Sequence[int], level: int) -> tuple[int, ...]:
    pj = field.p ** level
    return tuple(c % pj for c in rep)


@dataclass(frozen=True)
class CosetTerm:
    """z^A for A = rep + pi^level R; level None encodes the singleton {rep}."""

    level: int | None
    rep: tuple[int, ...]

    def sort_key(self):
        lev = self.level if self.level is not None else float("inf")
        return (lev, self.rep)


class CosetCombination:
    """Finite map from coset terms to rational coefficients."""

    __slots__ = ("field", "terms")

    def __init__(self, field: FieldDesc, terms: Mapping[CosetTerm, Fraction] | None = None):
        self.field = field
        self.terms: dict[CosetTerm, Fraction] = dict(terms or {})

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(field: FieldDesc) -> "CosetCombination":
        return CosetCombination(field)

    @staticmethod
    def coset(field: FieldDesc, rep, level: int | None, coeff=1) -> "CosetCombination":
        if isinstance(rep, RingElem):
            rep = rep.coeffs
        elif isinstance(rep, int):
            rep = (rep,) + (0,) * (field.f - 1)
        rep = tuple(int(c) for c in rep)
        if level is not None:
            rep = _reduce_rep(field, rep, level)
        return CosetCombination(field, {CosetTerm(level, rep): Fraction(coeff)})

    @staticmethod
    def point(field: FieldDesc, rep, coeff=1) -> "CosetCombination":
        return CosetCombination.coset(field, rep, INF, coeff)

    @staticmethod
    def full_ring(field: FieldDesc, coeff=1) -> "CosetCombination":
        return CosetCombination.coset(field, 0, 0, coeff)

    # -- linear structure -------------------------------------------------------

    def __add__(self, other: "CosetCombination") -> "CosetCombination":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, Fraction(0)) + c
        return CosetCombination(self.field, {t: c for t, c in out.items() if c != 0})

    def __sub__(self, other: "CosetCombination") -> "CosetCombination":
        return self + (other * -1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return CosetCombination(self.field)
            return CosetCombination(self.field, {t: c * other for t, c in self.terms.items()})
        if isinstance(other, CosetCombination):
            return coset_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def normalization(self) -> Fraction:
        """F(1): the coefficient sum; 1 for any generating function of a polynomial."""
        return sum(self.terms.values(), Fraction(0))

    def _parts(self):
        singles: dict[tuple[int, ...], Fraction] = {}
        finite: dict[CosetTerm, Fraction] = {}
        for t, c in self.terms.items():
            if c == 0:
                continue
            if t.level is None:
                singles[t.rep] = singles.get(t.rep, Fraction(0)) + c
            else:
                finite[t] = finite.get(t, Fraction(0)) + c
        return ({r: c for r, c in singles.items() if c != 0},
                {t: c for t, c in finite.items() if c != 0})

    def __eq__(self, other):
        """Equality as inverse-limit elements: singleton parts must agree
        exactly and the finite-level parts must have equal projections at the
        maximum level present (they are uniform at that level)."""
        if not isinstance(other, CosetCombination):
            return NotImplemented
        if self.field != other.field:
            return False
        s1, f1 = self._parts()
        s2, f2 = other._parts()
        if s1 != s2:
            return False
        level = max([t.level for t in f1] + [t.level for t in f2] + [0])
        p1 = CosetCombination(self.field, f1).project(level)
        p2 = CosetCombination(other.field, f2).project(level)
        return p1 == p2

    def __repr__(self):
        return f"CosetCombination({self.render()})"

    # -- canonicalization ---------------------------------------------------------

    def coalesce(self) -> "CosetCombination":
        """Canonical form: reduced reps, merged keys, equal-weight full tilings
        of a coset folded into the coarser term (q siblings with one coefficient
        c become the parent with coefficient q*c)."""
        merged: dict[CosetTerm, Fraction] = {}
        for t, c in self.terms.items():
            if c == 0:
                continue
            rep = t.rep if t.level is None else _reduce_rep(self.field, t.rep, t.level)
            key = CosetTerm(t.level, rep)
            merged[key] = merged.get(key, Fraction(0)) + c
        merged = {t: c for t, c in merged.items() if c != 0}
        levels = sorted({t.level for t in merged if t.level is not None}, reverse=True)
        q = self.field.q
        for j in levels:
            if j == 0:
                continue
            parents: dict[tuple[int, ...], list[tuple[CosetTerm, Fraction]]] = {}
            for t, c in list(merged.items()):
                if t.level == j:
                    parents.setdefault(_reduce_rep(self.field, t.rep, j - 1), []).append((t, c))
            for prep, children in parents.items():
                if len(children) != q:
                    continue
                coeffs = {c for _, c in children}
                if len(coeffs) != 1:
                    continue
                c = coeffs.pop()
                for t, _ in children:
                    del merged[t]
                key = CosetTerm(j - 1, prep)
                newc = merged.get(key, Fraction(0)) + c * q
                if newc == 0:
                    merged.pop(key, None)
                else:
                    merged[key] = newc
        return CosetCombination(self.field, merged)

    # -- the calculus ----------------------------------------------------------------

    def uniformize(self, j: int) -> "CosetCombination":
        """Replace each term by the level-j coset containing it (weights kept).

        Terms at level <= j are already constant on level-j structure and stay.
        """
        out: dict[CosetTerm, Fraction] = {}
        for t, c in self.terms.items():
            if t.level is not None and t.level <= j:
                key = t
            else:
                key = CosetTerm(j, _reduce_rep(self.field, t.rep, j))
            out[key] = out.get(key, Fraction(0)) + c
        return CosetCombination(self.field, out).coalesce()

    def scale(self, s) -> "CosetCombination":
        """F(z^s): coset a + pi^j R goes to s*a + pi^(j + v(s)) R.

        s may be a RingElem, an integer, or an exact coefficient tuple; the
        zero scalar collapses to F(1) * z^0.
        """
        field = self.field
        if isinstance(s, RingElem):
            s = s.coeffs
        elif isinstance(s, int):
            s = (s,) + (0,) * (field.f - 1)
        s = tuple(int(c) for c in s)
        v = _tuple_val(field, s)
        if v is INF:
            return CosetCombination.point(field, 0, self.normalization())
        out: dict[CosetTerm, Fraction] = {}
        for t, c in self.terms.items():
            rep = tuple(field._mul_tuples(s, t.rep))
            level = INF if t.level is None else t.level + v
            if level is not None:
                rep = _reduce_rep(field, rep, level)
            key = CosetTerm(level, rep)
            out[key] = out.get(key, Fraction(0)) + c
        return CosetCombination(field, out)

    def scale_pi(self, e: int) -> "CosetCombination":
        return self.scale(self.field.p ** e)

    def project(self, k: int) -> "ModularGF":
        """phi_k: the level-k group-algebra image."""
        field = self.field
        coeffs: dict[tuple[int, ...], Fraction] = {}
        for t, c in self.terms.items():
            if t.level is None or t.level >= k:
                key = _reduce_rep(field, t.rep, k)
                coeffs[key] = coeffs.get(key, Fraction(0)) + c
            else:
                spread = field.q ** (k - t.level)
                share = c / spread
                base = t.rep
                step = field.p ** t.level
                for code in range(spread):
                    offs = []
                    cc = code
                    for _ in range(field.f):
                        offs.append(cc % field.p ** (k - t.level))
                        cc //= field.p ** (k - t.level)
                    key = tuple((b + step * o) % field.p ** k for b, o in zip(base, offs))
                    coeffs[key] = coeffs.get(key, Fraction(0)) + share
        return ModularGF(field, k, coeffs)

    def ig(self) -> RationalFunction:
        """Exact zeta image: z^(pi^j R) gives t^j (1-1/q)/(1-t/q); a coset not
        containing 0 gives t^(valuation of its representative)."""
        field = self.field
        ball = geometric_unit_ball(field.q)
        total = RationalFunction(0)
        for t, c in self.terms.items():
            if t.level is None:
                v = _tuple_val(field, t.rep)
                if v is INF:
                    continue  # t^infinity = 0
                total = total + RationalFunction(Poly.t(v, c))
            elif not any(t.rep):
                total = total + RationalFunction(Poly.t(t.level, c)) * ball
            else:
                v = _tuple_val(field, t.rep)
                total = total + RationalFunction(Poly.t(v, c))
        return total

    def render(self) -> str:
        field = self.field
        lines = []
        for t in sorted(self.terms, key=CosetTerm.sort_key):
            c = self.terms[t]
            rep = t.rep
            if field.f == 1:
                rep_s = str(rep[0])
            else:
                rep_s = "(" + ",".join(str(x) for x in rep) + ")"
            if t.level is None:
                coset = f"{{{rep_s}}}"
            elif not any(rep):
                coset = f"{field.p}^{t.level}*R" if t.level else "R"
            else:
                coset = f"{rep_s} + {field.p}^{t.level}*R" if t.level else "R"
            lines.append(f"{c} * z^{{{coset}}}")
        return "  +  ".join(lines) if lines else "0"


def coset_mul(a: CosetCombination, b: CosetCombination) -> CosetCombination:
    """Bilinear extension of z^A z^B = z^(A+B)."""
    if a.field != b.field:
        raise ValueError("mixed ground rings")
    field = a.field
    out: dict[CosetTerm, Fraction] = {}
    for t1, c1 in a.terms.items():
        for t2, c2 in b.terms.items():
            if t1.level is None:
                level = t2.level
            elif t2.level is None:
                level = t1.level
            else:
                level = min(t1.level, t2.level)
            rep = tuple(x + y for x, y in zip(t1.rep, t2.rep))
            if level is not None:
                rep = _reduce_rep(field, rep, level)
            key = CosetTerm(level, rep)
            c = out.get(key, Fraction(0)) + c1 * c2
            if c == 0:
                out.pop(key, None)
            else:
                out[key] = c
    return CosetCombination(field, out).coalesce()


# -- modular generating functions ----------------------------------------------------


class ModularGF:
    """Normalized level-k value histogram in the group algebra of R/pi^k."""

    __slots__ = ("field", "k", "coeffs")

    def __init__(self, field: FieldDesc, k: int, coeffs: Mapping[tuple[int, ...], Fraction]):
        self.field = field
        self.k = k
        self.coeffs = {t: Fraction(c) for t, c in coeffs.items() if c != 0}

    def mass(self, rep) -> Fraction:
        if isinstance(rep, RingElem):
            rep = rep.coeffs
        elif isinstance(rep, int):
            rep = (rep,) + (0,) * (self.field.f - 1)
        return self.coeffs.get(_reduce_rep(self.field, rep, self.k), Fraction(0))

    def normalization(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    @property
    def is_normalized(self) -> bool:
        return self.normalization() == 1

    def project(self, j: int) -> "ModularGF":
        if j > self.k:
            raise ValueError("cannot project upward")
        out: dict[tuple[int, ...], Fraction] = {}
        for t, c in self.coeffs.items():
            key = _reduce_rep(self.field, t, j)
            out[key] = out.get(key, Fraction(0)) + c
        return ModularGF(self.field, j, out)

    def __eq__(self, other):
        if not isinstance(other, ModularGF):
            return NotImplemented
        return (self.field, self.k) == (other.field, other.k) and self.coeffs == other.coeffs

    def zero_mass(self) -> Fraction:
        return self.coeffs.get((0,) * self.field.f, Fraction(0))

    def render(self) -> str:
        lines = []
        for t in sorted(self.coeffs, key=lambda r: enc.encode_tuple(self.field, self.k, r)):
            rep_s = str(t[0]) if self.field.f == 1 else "(" + ",".join(map(str, t)) + ")"
            lines.append(f"{rep_s} : {self.coeffs[t]}")
        return "\n".join(lines)


def class_level_gf(cls: UnimodularClass, k: int = 3) -> ModularGF:
    """Level-k value distribution of a unimodular class, assembled block by
    block.  At k = 2*ell + 1 this determines the whole generating function of
    the class (the head is uniform at that level and the rest is the geometric
    recursion), so equality of these is strong isospectrality."""
    field = cls.field
    out = ModularGF(field, k, {(0,) * field.f: Fraction(1)})
    for block in cls.oracle_block_polys(k):
        out = gr_mul(out, modular_gf(block, k))
    return out


def gr_mul(a: ModularGF, b: ModularGF) -> ModularGF:
    """Group-algebra product: additive convolution over R/pi^k."""
    if a.field != b.field or a.k != b.k:
        raise ValueError("level or ring mismatch")
    pk = a.field.p ** a.k
    out: dict[tuple[int, ...], Fraction] = {}
    for t1, c1 in a.coeffs.items():
        for t2, c2 in b.coeffs.items():
            key = tuple((x + y) % pk for x, y in zip(t1, t2))
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return ModularGF(a.field, a.k, out)


def _grid_value_codes(qp: QuadPoly, k: int) -> np.ndarray:
    """Encoded values of the polynomial on the full grid (R/pi^k)^n, vectorized."""
    field = qp.field
    pk = field.p ** k
    size_one = pk ** field.f
    n = qp.n
    total = size_one ** n
    if total > SIZE_GUARD:
        raise ValueError(f"enumeration of {total} points exceeds the size guard")
    codes = np.arange(size_one, dtype=np.int64)
    var_comps = []
    rest_block = 1
    for i in range(n):
        reps = int(size_one ** (n - 1 - i))
        tiled = np.tile(np.repeat(codes, rest_block), reps)
        var_comps.append(enc.decode(field, k, tiled))
        rest_block *= size_one
    const = lambda e: [np.full(total, c % pk, dtype=np.int64) for c in e.coeffs]  # noqa: E731
    acc = const(qp.c.reduce_to(k) if qp.c.k >= k else qp.c)
    for i in range(n):
        bi = qp.b[i].reduce_to(k) if qp.b[i].k >= k else qp.b[i]
        if not bi.is_zero():
            acc = enc.vec_add(field, k, acc,
                              enc.vec_mul(field, k, const(bi), var_comps[i]))
        for j in range(i, n):
            mij = qp.M[i][j].reduce_to(k) if qp.M[i][j].k >= k else qp.M[i][j]
            if mij.is_zero():
                continue
            coeff = [2 * c for c in mij.coeffs] if j > i else mij.coeffs
            coeff_e = qp.field.elem(coeff, k)
            if coeff_e.is_zero():
                continue
            prod = enc.vec_mul(field, k, var_comps[i], var_comps[j])
            acc = enc.vec_add(field, k, acc, enc.vec_mul(field, k, const(coeff_e), prod))
    return enc.encode(field, k, acc)


def modular_gf(qp: QuadPoly, k: int) -> ModularGF:
    """Exact normalized value histogram of the polynomial at level k."""
    field = qp.field
    if qp.k < k:
        raise ValueError("coefficients carry less precision than the requested level")
    if qp.n == 0 or k == 0:
        if k == 0:
            return ModularGF(field, 0, {(0,) * field.f: Fraction(1)})
        return ModularGF(field, k, {qp.c.reduce_to(k).coeffs: Fraction(1)})
    values = _grid_value_codes(qp, k)
    counts = np.bincount(values, minlength=enc.ring_size(field, k))
    total = values.size
    out: dict[tuple[int, ...], Fraction] = {}
    for code in np.nonzero(counts)[0]:
        out[enc.decode_int(field, k, int(code))] = Fraction(int(counts[code]), total)
    return ModularGF(field, k, out)


# -- heads and Hensel enumeration ------------------------------------------------------


def head_unimodular(cls: UnimodularClass) -> CosetCombination:
    """Partial generating function of a unimodular form on the points that are
    not all divisible by pi: enumerate representatives mod pi^(ell+1) and land
    in level-(2 ell + 1) cosets.  Mass totals 1 - q^(-rank)."""
    field = cls.field
    n = cls.rank
    if n == 0:
        return CosetCombination.zero(field)
    ell = field.ell
    k_rep = ell + 1
    k_out = 2 * ell + 1
    qp = cls.quadpoly(k_out)
    size_one = (field.p ** k_rep) ** field.f
    total = size_one ** n
    if total > SIZE_GUARD:
        raise ValueError("head enumeration exceeds the size guard")
    codes = np.arange(size_one, dtype=np.int64)
    var_comps_small = enc.decode(field, k_rep, codes)
    # embed representatives into level k_out components
    grids = []
    rest_block = 1
    for i in range(n):
        reps = int(size_one ** (n - 1 - i))
        tiled = np.tile(np.repeat(codes, rest_block), reps)
        grids.append([comp[tiled] for comp in var_comps_small])
        rest_block *= size_one
    p = field.p
    unit_mask = np.zeros(total, dtype=bool)
    for comps in grids:
        var_unit = np.zeros(total, dtype=bool)
        for c in comps:
            var_unit |= (c % p) != 0
        unit_mask |= var_unit
    pk = p ** k_out
    acc = [np.zeros(total, dtype=np.int64) for _ in range(field.f)]
    for i in range(n):
        for j in range(i, n):
            mij = qp.M[i][j]
            coeff = [2 * c for c in mij.coeffs] if j > i else mij.coeffs
            ce = field.elem(coeff, k_out)
            if ce.is_zero():
                continue
            cc = [np.full(total, x % pk, dtype=np.int64) for x in ce.coeffs]
            prod = enc.vec_mul(field, k_out, grids[i], grids[j])
            acc = enc.vec_add(field, k_out, acc, enc.vec_mul(field, k_out, cc, prod))
    values = enc.encode(field, k_out, acc)[unit_mask]
    counts = np.bincount(values, minlength=enc.ring_size(field, k_out))
    out: dict[CosetTerm, Fraction] = {}
    denom = total
    for code in np.nonzero(counts)[0]:
        rep = enc.decode_int(field, k_out, int(code))
        out[CosetTerm(k_out, rep)] = Fraction(int(counts[code]), denom)
    return CosetCombination(field, out).coalesce()


def hensel_head(qp: QuadPoly, region, j: int) -> CosetCombination:
    """Partial generating function on a pi^(j+1)-regular product region where
    the derivative must have valuation exactly j at every representative.

    `region` is one spec per variable: "all", "units", or an iterable of
    residues mod pi^(j+1).  A representative whose gradient valuation differs
    from j raises, naming the point.
    """
    field = qp.field
    k_rep = j + 1
    k_out = 2 * j + 1
    if qp.k < k_out:
        raise ValueError("need coefficients at precision >= 2j+1")

    def residues(spec):
        if spec == "all":
            return [e for e in field.all_elems(k_rep)]
        if spec == "units":
            return [e for e in field.all_elems(k_rep) if e.is_unit()]
        out = []
        for r in spec:
            out.append(r if isinstance(r, RingElem) else field.elem(r, k_rep))
        return out

    per_var = [residues(s) for s in region]
    if len(per_var) != qp.n:
        raise ValueError("region needs one spec per variable")
    total = 1
    for r in per_var:
        total *= len(r)
    if total * max(1, field.q) > SIZE_GUARD:
        raise ValueError("region enumeration exceeds the size guard")

    out: dict[CosetTerm, Fraction] = {}
    denom = (field.q ** k_rep) ** qp.n
    qp_out = qp.reduce_to(k_out) if qp.k > k_out else qp
    for point_small in itertools.product(*per_var):
        point = [field.elem(e.coeffs, k_out) for e in point_small]
        grad = qp_out.gradient(point)
        vals = []
        for g in grad:
            gr = g.reduce_to(k_rep)
            v = 0
            while v < k_rep and not any(c % field.p ** (v + 1) for c in gr.coeffs):
                v += 1
            vals.append(v)
        if min(vals) != j:
            raise ValueError(f"derivative valuation {min(vals)} != {j} at point "
                             f"{tuple(e.coeffs for e in point_small)}")
        val = qp_out.evaluate(point)
        key = CosetTerm(k_out, _reduce_rep(field, val.coeffs, k_out))
        out[key] = out.get(key, Fraction(0)) + Fraction(1, denom)
    return CosetCombination(field, out).coalesce()


# -- truncated full generating functions -------------------------------------------


def truncated_gf(cls: UnimodularClass, valid_level: int) -> CosetCombination:
    """The generating function of a unimodular class, exact for projections up
    to `valid_level`: repeated head recursion G = H + q^(-n) G(z^(pi^2)), with
    the final self-similar tail replaced by its uniformization z^(pi^(2m) R).
    """
    field = cls.field
    n = cls.rank
    if n == 0:
        return CosetCombination.point(field, 0)
    m = max(1, (valid_level + 1) // 2)
    head = head_unimodular(cls)
    out = CosetCombination.zero(field)
    for t in range(m):
        out = out + head.scale_pi(2 * t) * Fraction(1, field.q ** (n * t))
    out = out + CosetCombination.coset(field, 0, 2 * m, Fraction(1, field.q ** (n * m)))
    return out.coalesce()


@dataclass
class AssembledGF:
    """A coset combination exact for projections at levels <= valid_level,
    with the geometric remainder terms listed separately (they are already
    included in `comb`)."""

    comb: CosetCombination
    valid_level: int
    remainders: tuple[tuple[Fraction, CosetTerm], ...]


def assemble_gf(jf, valid_level: int) -> AssembledGF:
    """Generating function of a standard-form polynomial, as a product of
    truncated block functions, the linear-part coset, and the constant shift."""
    field = jf.field
    if not jf.is_standard():
        raise ValueError("input must be in standard form (lambda above all exponents)")
    total = CosetCombination.point(field, jf.c.coeffs if jf.c is not None else 0)
    remainders = []
    for i, q in jf.blocks:
        need = max(1, valid_level - i)
        g = truncated_gf(q, need)
        m = max(1, (need + 1) // 2)
        remainders.append((Fraction(1, field.q ** (q.rank * m)),
                           CosetTerm(2 * m + i, (0,) * field.f)))
        total = coset_mul(total, g.scale_pi(i))
    if jf.lam is not None:
        total = coset_mul(total, CosetCombination.coset(field, 0, jf.lam))
    return AssembledGF(total.coalesce(), valid_level, tuple(remainders))


def ig_truncated(family: Sequence[ModularGF]) -> list[Fraction]:
    """Valuation-layer volumes from a projection-consistent family at levels
    0..K: entry k is (mass of pi^k R at level k) - (mass of pi^(k+1) R at
    level k+1), for k < K."""
    if not family:
        return []
    for k, gf in enumerate(family):
        if gf.k != k:
            raise ValueError("family must be indexed by level starting at 0")
        if k + 1 < len(family) and family[k + 1].project(k) != gf:
            raise ValueError(f"family is not projection-consistent at level {k}")
    out = []
    for k in range(len(family) - 1):
        out.append(family[k].zero_mass() - family[k + 1].zero_mass())
    return out


# -- closed-form heads -------------------------------------------------------------


def closed_form_head(cls: UnimodularClass) -> CosetCombination:
    """Head of a unimodular class straight from the closed formulas (odd p by
    rank parity and discriminant character; p = 2 by table shape)."""
    field = cls.field
    q = Fraction(field.q)
    r = cls.rank
    if r == 0:
        return CosetCombination.zero(field)
    if field.p != 2:
        d = cls.disc_elem(1)
        if r % 2 == 0:
            e = eta(d * (-field.one(1)) ** (r // 2))
            base = CosetCombination.full_ring(field) \
                + CosetCombination.coset(field, 0, 1, Fraction(e) / q ** (r // 2))
            return (base * (1 - Fraction(e) / q ** (r // 2))).coalesce()
        e = eta(d * (-field.one(1)) ** ((r - 1) // 2))
        out = CosetCombination.full_ring(field) \
            + CosetCombination.coset(field, 0, 1, -Fraction(1) / q ** r)
        for tau in teichmuller_set(field, 1):
            if tau.is_unit():
                out = out + CosetCombination.coset(
                    field, tau, 1, Fraction(e * eta(tau)) / q ** ((r + 1) // 2))
        return out.coalesce()

    # p = 2 shapes; all cosets live at level <= 3 and use exact mod-8 arithmetic
    T = teichmuller_set(field, 3)
    T_star = [t for t in T if t.is_unit()]
    S = trace_zero_teichmullers(field, 3)
    sign = -1 if cls.has_ell else 1

    def coset3(rep_elem, coeff):
        return CosetCombination.coset(field, rep_elem, 3, coeff)

    if not cls.square_coeffs:
        # planes only: (1 -+ q^(-r/2)) (z^(2R) +- q^(-r/2) z^(2 pi R))
        s = Fraction(sign)
        out = CosetCombination.coset(field, 0, 1) \
            + CosetCombination.coset(field, 0, 2, s / q ** (r // 2))
        return (out * (1 - s / q ** (r // 2))).coalesce()

    if len(cls.square_coeffs) == 1:
        a = field.elem(cls.square_coeffs[0], 3)
        s = Fraction(sign)
        out = CosetCombination.full_ring(field) * (1 - s / q ** ((r - 1) // 2))
        for tau in T:
            out = out + CosetCombination.coset(
                field, a * tau, 2, s * (1 - s / q ** ((r - 1) // 2)) / q ** ((r + 1) // 2))
        for tau in T_star:
            for sv in S:
                rep = a * tau * (field.one(3) + field.elem(4, 3) * sv)
                out = out + coset3(rep, Fraction(2) / q ** (r + 1))
        return out.coalesce()

    a = field.elem(cls.square_coeffs[0], 3)
    b = field.elem(cls.square_coeffs[1], 3)
    s = Fraction(sign)
    apb = a + b
    if not any(c % 4 for c in apb.coeffs):
        w = apb.divide_by_pi(2)  # (a+b)/4 at precision 1
        sigma = -1 if trace_parity(w * a.reduce_to(1).inverse()) else 1
        out = CosetCombination.full_ring(field) \
            - CosetCombination.coset(field, 0, 1, s / q ** (r // 2)) \
            + CosetCombination.coset(field, 0, 2, s / q ** (r // 2)
                                     - Fraction(sigma + 1) / q ** r) \
            + CosetCombination.coset(field, 0, 3, Fraction(sigma) / q ** r)
        return out.coalesce()
    half = apb.divide_by_pi(1)  # (a+b)/2, a unit, precision 2
    out = (CosetCombination.full_ring(field)
           + CosetCombination.coset(field, 0, 1, s / q ** (r // 2))) \
        * (1 - s / q ** ((r - 2) // 2))
    inv_half = half.inverse()  # 4/(a+b) = 2 * inv_half at precision 2
    for tau in T_star:
        for sv in S:
            rep1 = tau.reduce_to(2) * (a.reduce_to(2)
                                       + field.elem(2, 2) * inv_half * sv.reduce_to(2))
            out = out + CosetCombination.coset(field, rep1, 2,
                                               s * Fraction(2) / q ** ((r + 2) // 2))
            rep2 = tau * (apb + field.elem(4, 3) * sv)
            out = out + coset3(rep2, Fraction(2) / q ** (r + 1))
    return out.coalesce()
