"""Ground-truth counting, independent of every closed form in the package.

count_exhaustive enumerates polynomial values outright.  zeta_series_oracle
decomposes a polynomial into variable-disjoint blocks (guaranteed <= 2
variables each for standard forms), enumerates each block's value histogram
per level, and combines them by additive convolution -- the one scaling trick
the oracle allows itself, valid purely by disjointness of variables.

Convolutions of pure quadratic blocks are evaluated at square-class
representatives only: a histogram h of a quadratic form satisfies
h[u^2 v] = h[v] for every unit u (the bijection x -> u x on the domain), the
property is preserved by convolution, and it is *checked* on every input
array rather than assumed.  Linear blocks and the constant term are folded in
at extraction time as coset masses, which is plain counting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _speed as kern
from . import encoding as enc
from .fields import FieldDesc, RingElem, valuation
from .quadform import QuadPoly
from .ratfunc import RationalFunction

__all__ = [
    "ValueHistogram",
    "count_exhaustive",
    "convolve",
    "zeta_series_oracle",
    "verify_series",
    "SIZE_GUARD",
]

SIZE_GUARD = 10 ** 8
_INT64_BUDGET = 1 << 62


class ValueHistogram:
    """Exact value counts of a polynomial over (R/pi^k)^n."""

    __slots__ = ("field", "k", "counts", "domain_size")

    def __init__(self, field: FieldDesc, k: int, counts: dict[tuple[int, ...], int],
                 domain_size: int):
        self.field = field
        self.k = k
        self.counts = {t: int(c) for t, c in counts.items() if c}
        self.domain_size = domain_size
        assert sum(self.counts.values()) == domain_size

    def mass(self, rep) -> int:
        if isinstance(rep, RingElem):
            rep = rep.coeffs
        elif isinstance(rep, int):
            rep = (rep,) + (0,) * (self.field.f - 1)
        pk = self.field.p ** self.k
        return self.counts.get(tuple(c % pk for c in rep), 0)

    def normalized(self) -> dict[tuple[int, ...], Fraction]:
        return {t: Fraction(c, self.domain_size) for t, c in self.counts.items()}

    def __eq__(self, other):
        if not isinstance(other, ValueHistogram):
            return NotImplemented
        return (self.field, self.k, self.domain_size, self.counts) == \
            (other.field, other.k, other.domain_size, other.counts)


def _coeff_tuple(e: RingElem, m: int) -> tuple[int, ...]:
    pm = e.field.p ** m
    return tuple(c % pm for c in e.coeffs)


def _block_key(qp: QuadPoly, variables: Sequence[int], m: int):
    """Position-independent coefficient signature of a block at level m.

    A pure quadratic 1-variable block a x^2 is keyed by (valuation of a,
    square class of its unit part): replacing a by a u^2 rescales x by the
    unit u, a bijection of the domain, so such blocks share one histogram.
    """
    vs = tuple(variables)
    if len(vs) == 1 and qp.b[vs[0]].is_zero():
        a = qp.M[vs[0]][vs[0]]
        v = valuation(a)
        if v.is_infinite or (v.is_floor and v.value >= m) or \
                (not v.is_floor and v.value >= m):
            return ("vanishing-square",)
        if not v.is_floor:
            u = a.divide_by_pi(v.value)
            field = qp.field
            if field.p != 2 or u.k >= 3:
                from .quadform import canonical_square_coeff
                return ("square", v.value, canonical_square_coeff(field, u))
    items: list = ["generic", len(vs)]
    for a in vs:
        for bvar in vs:
            items.append(_coeff_tuple(qp.M[a][bvar], m))
    for a in vs:
        items.append(_coeff_tuple(qp.b[a], m))
    return tuple(items)


def _dense_block_hist(qp: QuadPoly, variables: Sequence[int], m: int) -> np.ndarray:
    """Dense int64 histogram of one <=2-variable block at level m (no constant)."""
    field = qp.field
    p, f = field.p, field.f
    modulus = field.modulus
    zero = (0,) * f
    if m == 0:
        return np.array([1], dtype=np.int64)
    if len(variables) == 1:
        v = variables[0]
        return kern.hist_poly1(p, f, m, modulus,
                               _coeff_tuple(qp.M[v][v], m),
                               _coeff_tuple(qp.b[v], m), zero)
    if len(variables) == 2:
        v, w = variables
        axy = qp.M[v][w] + qp.M[v][w]
        return kern.hist_poly2(p, f, m, modulus,
                               _coeff_tuple(qp.M[v][v], m),
                               _coeff_tuple(axy, m),
                               _coeff_tuple(qp.M[w][w], m),
                               _coeff_tuple(qp.b[v], m),
                               _coeff_tuple(qp.b[w], m), zero)
    raise ValueError("blocks larger than 2 variables are not enumerable here")


def count_exhaustive(qp: QuadPoly, k: int) -> ValueHistogram:
    """Exact histogram by full enumeration of (R/pi^k)^n; hard size guard."""
    field = qp.field
    if qp.k < k:
        raise ValueError("coefficients carry less precision than the requested level")
    L = enc.ring_size(field, k)
    if L ** max(qp.n, 1) > SIZE_GUARD:
        raise ValueError(f"enumeration of {L ** qp.n} points exceeds the size guard")
    if k == 0:
        return ValueHistogram(field, 0, {(): 1}, 1)
    qpk = qp.reduce_to(k) if qp.k > k else qp

    def dense(variables: tuple[int, ...], extra_lin: dict[int, RingElem],
              const: RingElem) -> np.ndarray:
        if 1 <= len(variables) <= 2:
            work = qpk
            if extra_lin:
                b = list(qpk.b)
                for v, add in extra_lin.items():
                    b[v] = b[v] + add
                work = QuadPoly(field, qpk.M, b, qpk.c)
            hist = _dense_block_hist(work, variables, k)
            cshift = _coeff_tuple(const, k)
            if any(cshift):
                hist = _shift_dense(field, k, hist, cshift)
            return hist
        if len(variables) == 0:
            out = np.zeros(L, dtype=np.int64)
            out[enc.encode_tuple(field, k, _coeff_tuple(const, k))] = 1
            return out
        # fix the last variable, recurse on the rest
        last = variables[-1]
        rest = variables[:-1]
        out = np.zeros(L, dtype=np.int64)
        for code in range(L):
            point = field.elem(enc.decode_int(field, k, code), k)
            lin2 = dict(extra_lin)
            for v in rest:
                bump = (qpk.M[v][last] + qpk.M[v][last]) * point
                lin2[v] = lin2.get(v, field.zero(k)) + bump
            c2 = const + (qpk.M[last][last] * point * point) + qpk.b[last] * point
            out += dense(rest, lin2, c2)
        return out

    allvars = tuple(range(qp.n))
    if qp.n == 0:
        arr = np.zeros(L, dtype=np.int64)
        arr[enc.encode_tuple(field, k, _coeff_tuple(qpk.c, k))] = 1
    else:
        arr = dense(allvars, {}, qpk.c)
    counts = {enc.decode_int(field, k, int(i)): int(arr[i]) for i in np.nonzero(arr)[0]}
    return ValueHistogram(field, k, counts, L ** qp.n if qp.n else 1)


def _shift_dense(field: FieldDesc, m: int, hist: np.ndarray, shift: tuple[int, ...]) -> np.ndarray:
    codes = np.arange(hist.size, dtype=np.int64)
    comps = enc.decode(field, m, codes)
    shifted = enc.encode(field, m, [c + s for c, s in zip(comps, shift)])
    out = np.zeros_like(hist)
    out[shifted] = hist
    return out


def convolve(h1: ValueHistogram, h2: ValueHistogram) -> ValueHistogram:
    """Additive convolution over R/pi^k; valid for disjoint-variable summands."""
    if h1.field != h2.field or h1.k != h2.k:
        raise ValueError("histogram field/level mismatch")
    if len(h1.counts) * len(h2.counts) > SIZE_GUARD:
        raise ValueError("convolution support exceeds the size guard")
    field, k = h1.field, h1.k
    pk = field.p ** k
    out: dict[tuple[int, ...], int] = {}
    for t1, c1 in h1.counts.items():
        for t2, c2 in h2.counts.items():
            key = tuple((a + b) % pk for a, b in zip(t1, t2))
            out[key] = out.get(key, 0) + c1 * c2
    return ValueHistogram(field, k, out, h1.domain_size * h2.domain_size)


# -- square-class structure for the radial fast path ---------------------------------


@lru_cache(maxsize=None)
def _unit_class_table(field: FieldDesc, j: int) -> dict[tuple[int, ...], int]:
    """Class id of each unit mod pi^min(j,3 or 1): the square class of a unit
    at level j is decided at level 3 (p = 2) or by the residue character
    (odd p); level 2 and 1 classes for p = 2 are coarser."""
    table: dict[tuple[int, ...], int] = {}
    if field.p != 2:
        from .fields import eta
        for u in field.all_elems(1):
            if u.is_unit():
                table[u.coeffs] = 0 if eta(u) == 1 else 1
        return table
    jj = min(j, 3)
    if jj >= 3:
        from .quadform import _unit_squares_mod8
        sqs = _unit_squares_mod8(field)
        reps: dict[tuple[int, ...], int] = {}
        for u in field.all_elems(3):
            if not u.is_unit():
                continue
            orbit = min(tuple((field._mul_tuples(u.coeffs, s)[i] % 8)
                              for i in range(field.f)) for s in sqs)
            if orbit not in reps:
                reps[orbit] = len(reps)
            table[u.coeffs] = reps[orbit]
        return table
    if jj == 2:
        taus = [t for t in _teich_sqs(field)]
        reps2: dict[tuple[int, ...], int] = {}
        for u in field.all_elems(2):
            if not u.is_unit():
                continue
            orbit = min(tuple((field._mul_tuples(u.coeffs, s)[i] % 4)
                              for i in range(field.f)) for s in taus)
            if orbit not in reps2:
                reps2[orbit] = len(reps2)
            table[u.coeffs] = reps2[orbit]
        return table
    for u in field.all_elems(1):
        if u.is_unit():
            table[u.coeffs] = 0
    return table


@lru_cache(maxsize=None)
def _teich_sqs(field: FieldDesc) -> tuple[tuple[int, ...], ...]:
    from .fields import teichmuller_set
    return tuple((t * t).reduce_to(2).coeffs for t in teichmuller_set(field, 2) if t.is_unit())


class _RadialContext:
    """Square-class decomposition of GR(p^m, f): class ids, representatives,
    and cached component arrays for gather/mask construction."""

    def __init__(self, field: FieldDesc, m: int):
        self.field = field
        self.m = m
        self.L = enc.ring_size(field, m)
        codes = np.arange(self.L, dtype=np.int64)
        self.comps = enc.decode(field, m, codes)
        val = enc.valuation_table(field, m)
        self.class_id = np.empty(self.L, dtype=np.int64)
        next_id = 0
        self.rep_codes: list[int] = []
        p = field.p
        for e in range(m):
            sel = np.nonzero(val == e)[0]
            if sel.size == 0:
                continue
            level = m - e
            pe = p ** e
            plevel = p ** min(level, 3 if p == 2 else 1)
            table = _unit_class_table(field, level)
            key_width = len(next(iter(table)))
            unit_comps = [((c[sel] // pe) % plevel) for c in self.comps]
            keys = [tuple(int(unit_comps[i][t]) for i in range(key_width))
                    for t in range(sel.size)]
            local: dict[int, int] = {}
            ids = np.empty(sel.size, dtype=np.int64)
            for t, keyt in enumerate(keys):
                cid = table[keyt]
                if cid not in local:
                    local[cid] = next_id
                    next_id += 1
                    self.rep_codes.append(int(sel[t]))
                ids[t] = local[cid]
            self.class_id[sel] = ids
        zero_sel = np.nonzero(val == m)[0]
        self.class_id[zero_sel] = next_id
        self.rep_codes.append(0)
        self.n_classes = next_id + 1
        # gather sending each code to its class representative
        self.rep_gather = np.asarray(self.rep_codes, dtype=np.int64)[self.class_id]
        self._mask_cache: dict = {}
        self._gather_cache: dict[int, np.ndarray] = {}
        self._validated: set[int] = set()

    def gather_for(self, rep_code: int) -> np.ndarray:
        """Index array v -> enc(rep - v), cached per representative."""
        hit = self._gather_cache.get(rep_code)
        if hit is not None:
            return hit
        field, m = self.field, self.m
        rep = enc.decode_int(field, m, rep_code)
        pm = field.p ** m
        out = enc.encode(field, m, [(r - c) % pm for r, c in zip(rep, self.comps)])
        self._gather_cache[rep_code] = out
        return out

    def validate(self, h: np.ndarray) -> bool:
        """Exact check that h is constant on every square class.

        When this holds for both convolution inputs, evaluating at one
        representative per class and expanding is *equal* to the schoolbook
        convolution: conv[u^2 w] = conv[w] follows by substituting v -> u^2 v,
        so the output is constant on the same classes.  Arrays that passed
        once are remembered by identity (they are never mutated).
        """
        if id(h) in self._validated:
            return True
        ok = bool(np.array_equal(h, h[self.rep_gather]))
        if ok:
            self._validated.add(id(h))
        return ok

    def coset_mask(self, shift: tuple[int, ...], level: int) -> np.ndarray:
        """Boolean mask of {v : v + shift = 0 mod pi^level}."""
        level = min(level, self.m)
        pl = self.field.p ** level
        key = (tuple(s % pl for s in shift), level)
        hit = self._mask_cache.get(key)
        if hit is not None:
            return hit
        mask = np.ones(self.L, dtype=bool)
        for c, s in zip(self.comps, shift):
            mask &= ((c + s) % pl) == 0
        self._mask_cache[key] = mask
        return mask


@lru_cache(maxsize=None)
def _radial_ctx(field: FieldDesc, m: int) -> _RadialContext:
    return _RadialContext(field, m)


def _radial_conv(ctx: _RadialContext, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Exact convolution of two square-class-invariant histograms, evaluated at
    one representative per class and expanded; falls back to the caller if the
    invariance check fails."""
    vals = np.empty(ctx.n_classes, dtype=np.int64)
    for cid in range(ctx.n_classes):
        v = kern.dot_shifted(h1, h2, ctx.gather_for(ctx.rep_codes[cid]))
        if v >= _INT64_BUDGET:
            raise OverflowError("convolution counts exceed the int64 budget")
        vals[cid] = v
    out = vals[ctx.class_id]
    ctx._validated.add(id(out))  # class-constant by construction; kept alive by the cache
    return out


def _dense_convolve(field: FieldDesc, m: int, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Schoolbook dense convolution (used when invariance does not hold)."""
    support = np.nonzero(h1)[0]
    if support.size * h2.size > SIZE_GUARD:
        raise ValueError("dense convolution exceeds the size guard")
    pm = field.p ** m
    comps = enc.decode(field, m, np.arange(h1.size, dtype=np.int64))
    out = np.zeros_like(h2)
    for code in support:
        shift = enc.decode_int(field, m, int(code))
        idx = enc.encode(field, m, [(c + s) % pm for c, s in zip(comps, shift)])
        out[idx] += int(h1[code]) * h2
    return out


# -- the zeta series oracle -------------------------------------------------------


_conv_cache: dict = {}


def _combined_quad_hist(qp: QuadPoly, quad_blocks, m: int) -> np.ndarray | None:
    """Dense histogram at level m of the direct sum of the quadratic blocks."""
    if m == 0 or not quad_blocks:
        return None
    field = qp.field
    key = (field, m, tuple(sorted(_block_key(qp, vs, m) for vs in quad_blocks)))
    hit = _conv_cache.get(key)
    if hit is not None:
        return hit
    ctx = _radial_ctx(field, m)
    hists = []
    for vs in quad_blocks:
        bkey = (field, m, _block_key(qp, vs, m))
        h = _conv_cache.get(bkey)
        if h is None:
            h = _dense_block_hist(qp, vs, m)
            _conv_cache[bkey] = h
        hists.append(h)
    acc = hists[0]
    for h in hists[1:]:
        if ctx.validate(acc) and ctx.validate(h):
            acc = _radial_conv(ctx, acc, h)
        else:
            acc = _dense_convolve(field, m, acc, h)
    _conv_cache[key] = acc
    return acc


def zeta_series_oracle(qp: QuadPoly, K: int) -> list[Fraction]:
    """First K coefficients of the zeta series, from counting alone.

    Needs per-block enumerability: every variable block of <= 2 variables (as
    standard forms guarantee); the constant and any purely linear blocks are
    folded in as coset masses at extraction.
    """
    field = qp.field
    if qp.k < K:
        raise ValueError("coefficient precision below the requested series length")
    quad_blocks = []
    linear_vals: list[int] = []
    dead_vars = 0
    for vs in qp.quadratic_part().variable_blocks():
        if all(qp.M[a][b].is_zero() for a in vs for b in vs):
            for v in vs:
                bv = qp.b[v]
                if bv.is_zero():
                    dead_vars += 1
                else:
                    w = 0
                    while w < qp.k and not any(c % field.p ** (w + 1) for c in bv.coeffs):
                        w += 1
                    if w >= qp.k:
                        raise ValueError("linear coefficient valuation not certified")
                    linear_vals.append(w)
        else:
            if len(vs) > 2:
                raise ValueError("a quadratic block exceeds 2 variables")
            quad_blocks.append(vs)

    n = qp.n
    lam = min(linear_vals) if linear_vals else None
    extra_linear = len(linear_vals) - 1 if linear_vals else 0

    def zero_count(m: int) -> int:
        """Number of solutions of qp = 0 mod pi^m."""
        if m == 0:
            return 1
        c = _coeff_tuple(qp.c, m)
        lam_eff = min(lam, m) if lam is not None else None
        h = _combined_quad_hist(qp, quad_blocks, m)
        qblock_vars = sum(len(vs) for vs in quad_blocks)
        outside = field.q ** (m * (dead_vars + extra_linear))
        if h is None:
            # no quadratic blocks: count solutions of linear + constant
            if lam_eff is None:
                ok = all(x % field.p ** m == 0 for x in c)
                return outside if ok else 0
            ok = all(x % field.p ** lam_eff == 0 for x in c)
            return outside * field.q ** lam_eff if ok else 0
        ctx = _radial_ctx(field, m)
        if lam_eff is None:
            idx = enc.encode_tuple(field, m, tuple((-x) % field.p ** m for x in c))
            return outside * int(h[idx])
        mask = ctx.coset_mask(c, lam_eff)
        return outside * field.q ** lam_eff * kern.masked_sum(h, mask)

    out: list[Fraction] = []
    prev = Fraction(zero_count(0), 1)
    for m in range(1, K + 1):
        denom = (field.q ** (m * n)) if n else 1
        cur = Fraction(zero_count(m), denom)
        out.append(prev - cur)
        prev = cur
    return out


def verify_series(qp: QuadPoly, z: RationalFunction, K: int) -> dict:
    """Compare the closed form against the counting oracle; a report, not an error."""
    oracle_prefix = zeta_series_oracle(qp, K)
    closed_prefix = z.series_prefix(K)
    first_bad = None
    for i, (a, b) in enumerate(zip(oracle_prefix, closed_prefix)):
        if a != b:
            first_bad = i
            break
    return {
        "status": "PASS" if first_bad is None else "FAIL",
        "first_mismatch": first_bad,
        "oracle_prefix": [str(x) for x in oracle_prefix],
        "closed_form_prefix": [str(x) for x in closed_prefix],
    }
