"""Closed-form Igusa local zeta functions of standard-form quadratic
polynomials: the odd-p evaluator driven by the single-head table I_a(r, d),
the unramified 2-adic evaluator driven by the three-form table I(Q0, Q1, Q2),
the exact reduced-denominator classification for odd p, and the four-case
tail simplification shared by both paths of the final homogeneous block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .fields import FieldDesc, RingElem, eta, pick_nonsquare, trace_parity, valuation
from .quadform import JordanForm, UnimodularClass
from .ratfunc import DenominatorShape, Poly, RationalFunction, geometric_unit_ball

__all__ = [
    "ZetaResult",
    "head_zeta_odd",
    "zeta_odd",
    "head_zeta_two",
    "zeta_two_unramified",
    "reduced_denominator_odd",
    "tail_term_odd",
    "zeta_of_jordan",
]

_SIGN_PRECISION = 5  # enough to read every mod-8 class and mod-2 trace used below


@dataclass
class ZetaResult:
    zf: RationalFunction
    shape: DenominatorShape
    metadata: dict

    def render(self) -> str:
        return self.zf.render()


def _finish(jf: JordanForm, zf: RationalFunction, meta: dict) -> ZetaResult:
    shape = DenominatorShape.recognize(zf.den, jf.field.q, jf.total_rank)
    meta = dict(meta)
    meta.setdefault("field", {"p": jf.field.p, "f": jf.field.f,
                              "modulus": list(jf.field.modulus)})
    meta.setdefault("standard_form", jf.render())
    return ZetaResult(zf, shape, meta)


# -- odd p ----------------------------------------------------------------------


def head_zeta_odd(field: FieldDesc, r: int, d: RingElem, a: RingElem | None) -> RationalFunction:
    """I_a(r, d): the zeta image of z^a times the head of the rank-r,
    discriminant-d unimodular form.  a = None (or pi | a) selects the
    divisible rows."""
    if field.p == 2:
        raise ValueError("odd-p table requested at p = 2")
    q = Fraction(field.q)
    igr = geometric_unit_ball(field.q)
    unit_a = a is not None and a.is_unit()
    if r % 2 == 1:
        if not unit_a:
            return RationalFunction(Poly([1, -1 / q ** r])) * igr
        e = eta(a.reduce_to(1) * ((-field.one(1)) ** ((r + 1) // 2)) * d.reduce_to(1))
        lead = RationalFunction(Poly([1, Fraction(e) / q ** ((r + 1) // 2)]))
        return lead * igr - Fraction(1, field.q ** r) - Fraction(e) / q ** ((r + 1) // 2)
    e = eta(d.reduce_to(1) * ((-field.one(1)) ** (r // 2))) if r > 0 else 1
    factor = 1 - Fraction(e) / q ** (r // 2)
    if not unit_a:
        return RationalFunction(Poly([1, Fraction(e) / q ** (r // 2)])) * factor * igr
    return (igr + Fraction(e) / q ** (r // 2)) * factor


def tail_term_odd(field: FieldDesc, omega: int, weight_prev: int,
                  prev: UnimodularClass, last: UnimodularClass,
                  r_total: int, d_total: RingElem) -> RationalFunction:
    """The final homogeneous contribution, in its four-case simplified form:
    [t^(omega-1)/q_(omega-1) I_0(prev) + t^omega/q_(omega) I_0(last)] over
    (1 - t^2/q^r), rewritten so the candidate poles are explicit."""
    q = Fraction(field.q)
    igr = geometric_unit_ball(field.q)
    rp, rl = prev.rank, last.rank
    lead = RationalFunction(Poly.t(omega - 1, Fraction(1, weight_prev)))
    one = field.one(1)
    if rp % 2 == 1 and rl % 2 == 1:
        return lead * igr
    t_minus_1 = Poly([-1, 1])
    if rp % 2 == 0 and rl % 2 == 0:
        ep = eta(prev.disc_elem(1) * (-one) ** (rp // 2)) if rp else 1
        et = eta(d_total.reduce_to(1) * (-one) ** (r_total // 2)) if r_total else 1
        den = Poly([1, -Fraction(et) / q ** (r_total // 2)])
        bracket = 1 + RationalFunction(t_minus_1 * Fraction(ep), den) / q ** (rp // 2)
        return lead * bracket * igr
    if rp % 2 == 0:  # prev even, last odd
        ep = eta(prev.disc_elem(1) * (-one) ** (rp // 2)) if rp else 1
        den = Poly([1, 0, -Fraction(1) / q ** r_total])
        bracket = 1 + RationalFunction(t_minus_1 * Fraction(ep), den) / q ** (rp // 2)
        return lead * bracket * igr
    el = eta(last.disc_elem(1) * (-one) ** (rl // 2)) if rl else 1
    den = Poly([1, 0, -Fraction(1) / q ** r_total])
    num = Poly.t(1) * t_minus_1 * Fraction(el)
    bracket = 1 + RationalFunction(num, den) / q ** ((rp + r_total) // 2)
    return lead * bracket * igr


def zeta_odd(jf: JordanForm) -> ZetaResult:
    """Odd-p evaluator, dispatching on the linear/constant data.

    Case boundaries: no linear part and no constant is the homogeneous case;
    a linear part pi^lambda x with v(c) >= lambda reduces to the constant-free
    case; otherwise the constant dominates (kappa = v(c) < lambda, including
    lambda infinite).  Blocks at exponents >= lambda never matter and are
    dropped up front.
    """
    field = jf.field
    if field.p == 2:
        raise ValueError("odd-p evaluator requested at p = 2")
    q = Fraction(field.q)
    igr = geometric_unit_ball(field.q)
    c = jf.c if jf.c is not None else field.zero(1, exact=True)
    c_zero = c.is_zero()
    if jf.lam is not None and [i for i, _ in jf.blocks if i >= jf.lam]:
        jf = JordanForm(field, tuple(b for b in jf.blocks if b[0] < jf.lam),
                        jf.lam, jf.c, jf.audit)

    def I0(i: int) -> RationalFunction:
        return head_zeta_odd(field, jf.folded_rank(i), jf.folded(i).disc_elem(1), None)

    if jf.lam is None and c_zero:
        if jf.total_rank == 0:
            return _finish(jf, RationalFunction(0),
                           {"dispatch": "degenerate", "degenerate": True})
        omega, r = jf.omega, jf.total_rank
        total = RationalFunction(0)
        for i in range(omega - 1):
            total = total + RationalFunction(Poly.t(i, Fraction(1, jf.q_weight(i)))) * I0(i)
        d_total = field.one(1)
        for _, qcls in jf.blocks:
            d_total = d_total * qcls.disc_elem(1)
        tail = tail_term_odd(field, omega, jf.q_weight(omega - 1),
                             jf.folded(omega - 1), jf.folded(omega), r, d_total)
        return _finish(jf, total + tail, {"dispatch": "homogeneous"})

    v_c = valuation(c)
    if jf.lam is not None and (v_c.is_infinite or
                               (not v_c.is_floor and v_c.value >= jf.lam) or
                               (v_c.is_floor and v_c.value >= jf.lam)):
        lam = jf.lam
        total = RationalFunction(0)
        for i in range(lam):
            total = total + RationalFunction(Poly.t(i, Fraction(1, jf.q_weight(i)))) * I0(i)
        total = total + RationalFunction(Poly.t(lam, Fraction(1, jf.q_weight(lam)))) * igr
        return _finish(jf, total, {"dispatch": "linear-dominates"})

    if v_c.is_floor or v_c.is_infinite:
        raise ValueError("constant valuation not certified at this precision")
    kappa = v_c.value
    total = RationalFunction(0)
    for i in range(kappa + 1):
        a = c.divide_by_pi(i)
        total = total + RationalFunction(Poly.t(i, Fraction(1, jf.q_weight(i)))) * \
            head_zeta_odd(field, jf.folded_rank(i), jf.folded(i).disc_elem(1), a)
    total = total + RationalFunction(Poly.t(kappa, Fraction(1, jf.q_weight(kappa + 1))))
    return _finish(jf, total, {"dispatch": "constant-dominates", "kappa": kappa})


def reduced_denominator_odd(jf: JordanForm) -> Poly:
    """Exact reduced denominator g(t) (constant term 1) of the zeta function of
    a pure quadratic form over odd p, classified by the parity-folded rank and
    discriminant data."""
    field = jf.field
    if field.p == 2:
        raise ValueError("denominator classification is for odd p")
    if (jf.lam is not None) or (jf.c is not None and not jf.c.is_zero()):
        raise ValueError("pure quadratic forms only")
    q = Fraction(field.q)
    r = jf.total_rank
    if r == 0:
        return Poly.const(1)
    one = field.one(1)
    alpha = pick_nonsquare(field, 1)

    def parity_data(parity: int):
        rr = sum(qc.rank for i, qc in jf.blocks if i % 2 == parity)
        dd = one
        for i, qc in jf.blocks:
            if i % 2 == parity:
                dd = dd * qc.disc_elem(1)
        return rr, dd

    def small(rd):
        rr, dd = rd
        if rr == 0:
            return True
        if rr == 1:
            return True  # both discriminant classes (1,1) and (1,alpha) listed
        if rr == 2:
            return eta(dd * (-alpha)) == 1
        return False

    re_, de = parity_data(0)
    ro, do = parity_data(1)
    if small((re_, de)) and small((ro, do)):
        if re_ == ro:
            return Poly([1, -1 / q ** (r // 2)])
        return Poly([1, 0, -1 / q ** r])
    if re_ % 2 == 1 and ro % 2 == 1:
        return Poly([1, -1 / q])
    if re_ % 2 == 0 and ro % 2 == 0:
        d = de * do
        e = eta(d * (-one) ** (r // 2))
        return Poly([1, -1 / q]) * Poly([1, -Fraction(e) / q ** (r // 2)])
    return Poly([1, -1 / q]) * Poly([1, 0, -1 / q ** r])


# -- unramified p = 2 ---------------------------------------------------------------


def _sigma_sign(field: FieldDesc, a: RingElem, b: RingElem) -> int:
    """(-1)^Tr((a+b)/(4a)) for units a = b = 1 mod 2 with 4 | a+b."""
    w = (a + b).divide_by_pi(2)
    return -1 if trace_parity(w * a.reduce_to(w.k).inverse()) else 1


def _phi_sign(field: FieldDesc, a: RingElem, b: RingElem, c: RingElem) -> int:
    """(-1)^Tr((c/2)(e^q + e)) with e = (a+b)/(2c), for 2 || a+b."""
    e = (a + b).divide_by_pi(1) * c.reduce_to(a.k - 1).inverse()
    arg = ((frobenius_power_q(e) + e).divide_by_pi(1)) * c.reduce_to(e.k - 1)
    return -1 if trace_parity(arg) else 1


def _psi_sign(field: FieldDesc, a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> int:
    """(-1)^Tr((c/2)(g^q + e)) with g = (c+d)/2, e = (a+b)/(2c)."""
    e = (a + b).divide_by_pi(1) * c.reduce_to(a.k - 1).inverse()
    g = (c + d).divide_by_pi(1)
    arg = ((frobenius_power_q(g) + e).divide_by_pi(1)) * c.reduce_to(e.k - 1)
    return -1 if trace_parity(arg) else 1


def frobenius_power_q(a: RingElem) -> RingElem:
    """a^q in GR(2^k, f)."""
    return a ** a.field.q


def head_zeta_two(q0: UnimodularClass, q1: UnimodularClass,
                  q2: UnimodularClass) -> RationalFunction:
    """I(Q0, Q1, Q2): the zeta image of H(Q0) * G(Q1 at pi) * G(Q2 at pi^2)
    for unramified p = 2, by table row."""
    field = q0.field
    if field.p != 2:
        raise ValueError("the three-form table needs p = 2")
    q = Fraction(field.q)
    igr = geometric_unit_ball(field.q)
    r0, r1 = q0.rank, q1.rank
    s0 = -1 if q0.has_ell else 1
    s1 = -1 if q1.has_ell else 1
    norm1, norm2 = q1.norm_code(), q2.norm_code()
    nsq0 = len(q0.square_coeffs)

    if nsq0 == 0:
        if norm1 != "R":
            factor = (1 - Fraction(s0) / q ** (r0 // 2))
            return factor * RationalFunction(Poly.t(1)
                                             + Poly.t(2, Fraction(s0) / q ** (r0 // 2))) * igr
        return (1 - 1 / q ** r0) * RationalFunction(Poly.t(1)) * igr

    if nsq0 == 1:
        if norm1 != "R":
            poly = Poly([1]) - Poly.t(2, Fraction(1) / q ** r0) \
                + (Poly.t(2) - Poly.t(1)) * Fraction(s0) * (1 / q ** ((r0 + 1) // 2))
            return RationalFunction(poly) * igr
        return RationalFunction(Poly([1]) - Poly.t(1, Fraction(1) / q ** r0)) * igr

    a = field.elem(q0.square_coeffs[0], _SIGN_PRECISION)
    b = field.elem(q0.square_coeffs[1], _SIGN_PRECISION)
    apb4 = not any(x % 4 for x in (a + b).coeffs)
    plain = RationalFunction(Poly([1]) - Poly.t(1, Fraction(1) / q ** r0)) * igr
    t32 = Poly.t(3) - Poly.t(2)
    t21 = Poly.t(2) - Poly.t(1)

    if apb4:
        sigma = _sigma_sign(field, a, b)
        if norm1 != "R":
            base = Poly([1]) - Poly.t(2, Fraction(1) / q ** r0) \
                + t21 * Fraction(s0) * (1 / q ** (r0 // 2))
            if norm2 != "R":
                base = base + t32 * Fraction(s1 * sigma) * (1 / q ** (r0 + r1 // 2))
            return RationalFunction(base) * igr
        nsq1 = len(q1.square_coeffs)
        if norm2 == "R":
            return plain
        if nsq1 == 1:
            poly = Poly([1]) - Poly.t(1, Fraction(1) / q ** r0) \
                + t32 * Fraction(s1 * sigma) * (1 / q ** (r0 + (r1 + 1) // 2))
            return RationalFunction(poly) * igr
        cc = field.elem(q1.square_coeffs[0], _SIGN_PRECISION)
        dd = field.elem(q1.square_coeffs[1], _SIGN_PRECISION)
        if not any(x % 4 for x in (a + b + cc + dd).coeffs):
            poly = Poly([1]) - Poly.t(1, Fraction(1) / q ** r0) \
                + t32 * Fraction(s1 * sigma) * (1 / q ** (r0 + r1 // 2))
            return RationalFunction(poly) * igr
        return plain

    # 4 does not divide a + b
    if norm1 != "R":
        return RationalFunction(Poly([1]) - Poly.t(2, Fraction(1) / q ** r0)) * igr
    nsq1 = len(q1.square_coeffs)
    if norm2 == "R":
        return plain
    if nsq1 == 1:
        cc = field.elem(q1.square_coeffs[0], _SIGN_PRECISION)
        phi = _phi_sign(field, a, b, cc)
        poly = Poly([1]) - Poly.t(1, Fraction(1) / q ** r0) \
            + t32 * Fraction(s1 * phi) * (1 / q ** (r0 + (r1 + 1) // 2))
        return RationalFunction(poly) * igr
    cc = field.elem(q1.square_coeffs[0], _SIGN_PRECISION)
    dd = field.elem(q1.square_coeffs[1], _SIGN_PRECISION)
    if not any(x % 4 for x in (a + b + cc + dd).coeffs):
        psi = _psi_sign(field, a, b, cc, dd)
        poly = Poly([1]) - Poly.t(1, Fraction(1) / q ** r0) \
            + t32 * Fraction(s1 * psi) * (1 / q ** (r0 + r1 // 2))
        return RationalFunction(poly) * igr
    return plain


def zeta_two_unramified(jf: JordanForm) -> ZetaResult:
    """Unramified 2-adic evaluator for Q (+) pi^lambda x with zero constant.

    Dispatch on lambda: absent (homogeneous), 0, 1, and >= 2, where the last
    two table arguments degenerate to Sq per the uniformization identities."""
    field = jf.field
    if field.p != 2:
        raise ValueError("2-adic evaluator requested at odd p")
    if jf.c is not None and not jf.c.is_zero():
        raise ValueError("nonzero constant terms are outside this evaluator")
    q = Fraction(field.q)
    igr = geometric_unit_ball(field.q)
    sq = UnimodularClass.sq(field, 1)

    if jf.lam is None:
        if jf.total_rank == 0:
            return _finish(jf, RationalFunction(0),
                           {"dispatch": "degenerate", "degenerate": True})
        omega, r = jf.omega, jf.total_rank
        total = RationalFunction(0)
        for i in range(omega - 1):
            term = head_zeta_two(jf.folded(i), jf.folded(i + 1), jf.block_at(i + 2))
            total = total + RationalFunction(Poly.t(i, Fraction(1, jf.q_weight(i)))) * term
        zero = UnimodularClass.zero(field)
        bracket = RationalFunction(Poly.t(omega - 1, Fraction(1, jf.q_weight(omega - 1)))) \
            * head_zeta_two(jf.folded(omega - 1), jf.folded(omega), zero) \
            + RationalFunction(Poly.t(omega, Fraction(1, jf.q_weight(omega)))) \
            * head_zeta_two(jf.folded(omega), jf.folded(omega - 1), zero)
        geom = RationalFunction(Poly([1]), Poly([1, 0, -1 / q ** r]))
        return _finish(jf, total + bracket * geom, {"dispatch": "homogeneous"})

    lam = jf.lam
    if [i for i, _ in jf.blocks if i >= lam]:
        raise ValueError("standard form required: blocks at exponents >= lambda")
    if lam == 0:
        return _finish(jf, igr, {"dispatch": "lambda=0"})
    if lam == 1:
        r0 = jf.folded_rank(0)
        zf = head_zeta_two(jf.folded(0), sq, sq) \
            + RationalFunction(Poly.t(1, Fraction(1) / q ** r0)) * igr
        return _finish(jf, zf, {"dispatch": "lambda=1"})
    total = RationalFunction(0)
    for i in range(lam - 2):
        term = head_zeta_two(jf.folded(i), jf.folded(i + 1), jf.block_at(i + 2))
        total = total + RationalFunction(Poly.t(i, Fraction(1, jf.q_weight(i)))) * term
    total = total + RationalFunction(Poly.t(lam - 2, Fraction(1, jf.q_weight(lam - 2)))) \
        * head_zeta_two(jf.folded(lam - 2), jf.folded(lam - 1), sq)
    total = total + RationalFunction(Poly.t(lam - 1, Fraction(1, jf.q_weight(lam - 1)))) \
        * head_zeta_two(jf.folded(lam - 1), sq, sq)
    total = total + RationalFunction(Poly.t(lam, Fraction(1, jf.q_weight(lam)))) * igr
    return _finish(jf, total, {"dispatch": f"lambda={lam}"})


def zeta_of_jordan(jf: JordanForm) -> ZetaResult:
    """Field-appropriate evaluator."""
    return zeta_odd(jf) if jf.field.p != 2 else zeta_two_unramified(jf)
