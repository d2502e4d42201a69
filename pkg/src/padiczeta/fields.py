"""Exact arithmetic in R/pi^k for the valuation ring R of an unramified p-adic field.

R/pi^k is modeled as the Galois ring GR(p^k, f) = (Z/p^k)[x]/(m(x)) with m monic of
degree f and irreducible mod p.  Elements are coefficient tuples; every element
carries its own precision k and binary operations insist on equal precision, so
congruence-sensitive code (mod-8 square tests, trace parities) cannot silently
mix precisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "FieldDesc",
    "RingElem",
    "ExtValuation",
    "INFINITY",
    "valuation",
    "teichmuller",
    "frobenius",
    "trace",
    "trace_parity",
    "is_square_unit",
    "eta",
    "pick_nonsquare",
    "pick_xi",
    "teichmuller_set",
    "trace_zero_teichmullers",
]

_MAX_P = 97
_MAX_F = 3


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_eval_mod(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _is_irreducible_mod_p(coeffs: Sequence[int], p: int) -> bool:
    """Irreducibility over F_p of a monic polynomial of degree <= 3."""
    deg = len(coeffs) - 1
    if deg == 1:
        return True
    # degree 2 or 3: irreducible over a field iff it has no root
    return all(_poly_eval_mod(coeffs, x, p) != 0 for x in range(p))


def default_modulus(p: int, f: int) -> tuple[int, ...]:
    """Least monic irreducible of degree f over F_p, by ascending coefficient tuple."""
    if f == 1:
        return (0, 1)
    bound = p ** f
    for code in range(bound):
        coeffs = []
        c = code
        for _ in range(f):
            coeffs.append(c % p)
            c //= p
        cand = tuple(coeffs) + (1,)
        if _is_irreducible_mod_p(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {f} mod {p}")  # pragma: no cover


@dataclass(frozen=True)
class FieldDesc:
    """Unramified ground ring data: prime p, residue degree f, q = p^f, pi = p."""

    p: int
    f: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.p > _MAX_P or not (1 <= self.f <= _MAX_F):
            raise ValueError("supported range is p <= 97, 1 <= f <= 3")
        if len(self.modulus) != self.f + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree f (low coefficients first)")
        if not _is_irreducible_mod_p([c % self.p for c in self.modulus], self.p):
            raise ValueError("modulus is reducible mod p")

    @staticmethod
    def make(p: int, f: int = 1, modulus: Iterable[int] | None = None) -> "FieldDesc":
        mod = tuple(modulus) if modulus is not None else default_modulus(p, f)
        return FieldDesc(p, f, mod)

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def ell(self) -> int:
        """Valuation of 2; this ring is unramified, so 1 exactly when p = 2."""
        return 1 if self.p == 2 else 0

    @property
    def q_frac(self) -> Fraction:
        return Fraction(self.q)

    def prime_field(self) -> "FieldDesc":
        return FieldDesc(self.p, 1, (0, 1))

    # -- element constructors -------------------------------------------------

    def elem(self, coeffs: int | Iterable[int], k: int) -> "RingElem":
        if isinstance(coeffs, int):
            coeffs = (coeffs,) + (0,) * (self.f - 1)
        cs = tuple(int(c) for c in coeffs)
        if len(cs) != self.f:
            raise ValueError(f"need {self.f} coefficients, got {len(cs)}")
        pk = self.p ** k
        return RingElem(self, k, tuple(c % pk for c in cs))

    def zero(self, k: int, exact: bool = False) -> "RingElem":
        z = self.elem(0, k)
        return z.declare_exact_zero() if exact else z

    def one(self, k: int) -> "RingElem":
        return self.elem(1, k)

    def gen(self, k: int) -> "RingElem":
        """The residue x of the modulus variable (only useful when f >= 2)."""
        if self.f == 1:
            raise ValueError("prime field has no generator beyond 1")
        return self.elem((0, 1) + (0,) * (self.f - 2), k)

    def all_elems(self, k: int):
        pk = self.p ** k
        if self.f == 1:
            for c in range(pk):
                yield self.elem((c,), k)
        else:
            total = pk ** self.f
            for code in range(total):
                cs = []
                c = code
                for _ in range(self.f):
                    cs.append(c % pk)
                    c //= pk
                yield self.elem(cs, k)

    def _mul_tuples(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        """Exact product in Z[x]/(modulus); no reduction mod any p^k."""
        f = self.f
        if f == 1:
            return (a[0] * b[0],)
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        # reduce degrees f .. 2f-2 by x^f = -(m_0 + ... + m_{f-1} x^{f-1})
        for d in range(2 * f - 2, f - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for j in range(f):
                    prod[d - f + j] -= c * self.modulus[j]
        return tuple(prod[:f])


class ExtValuation:
    """A valuation value: a natural number, a floor 'at least k', or INFINITY."""

    __slots__ = ("value", "is_floor")

    def __init__(self, value: int | None, is_floor: bool = False):
        self.value = value  # None encodes infinity
        self.is_floor = is_floor

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __eq__(self, other):
        if isinstance(other, int):
            return not self.is_floor and self.value == other
        if isinstance(other, ExtValuation):
            return (self.value, self.is_floor) == (other.value, other.is_floor)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.is_floor))

    def __add__(self, other: "ExtValuation | int") -> "ExtValuation":
        o = other if isinstance(other, ExtValuation) else ExtValuation(other)
        if self.is_infinite or o.is_infinite:
            return INFINITY
        return ExtValuation(self.value + o.value, self.is_floor or o.is_floor)

    __radd__ = __add__

    def min_with(self, other: "ExtValuation") -> "ExtValuation":
        if self.is_infinite:
            return other
        if other.is_infinite:
            return self
        return self if self.value <= other.value else other

    def __repr__(self):
        if self.is_infinite:
            return "INFINITY"
        return f">= {self.value}" if self.is_floor else str(self.value)


INFINITY = ExtValuation(None)


class RingElem:
    """An element of GR(p^k, f), i.e. R/pi^k R, as a polynomial residue."""

    __slots__ = ("field", "k", "coeffs", "exact_zero")

    def __init__(self, field: FieldDesc, k: int, coeffs: tuple[int, ...], exact_zero: bool = False):
        if k < 1:
            raise ValueError("precision k must be >= 1")
        self.field = field
        self.k = k
        self.coeffs = coeffs
        self.exact_zero = exact_zero

    # -- bookkeeping ----------------------------------------------------------

    def _check(self, other: "RingElem"):
        if self.field != other.field:
            raise ValueError("mixed ground rings")
        if self.k != other.k:
            raise ValueError(f"mixed precisions {self.k} != {other.k} (no silent coercion)")

    def declare_exact_zero(self) -> "RingElem":
        if any(self.coeffs):
            raise ValueError("element is visibly nonzero")
        return RingElem(self.field, self.k, self.coeffs, exact_zero=True)

    def reduce_to(self, k: int) -> "RingElem":
        if k > self.k:
            raise ValueError("cannot raise precision")
        if k == self.k:
            return self
        pk = self.field.p ** k
        return RingElem(self.field, k, tuple(c % pk for c in self.coeffs), self.exact_zero)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return any(c % self.field.p for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            return NotImplemented
        return (self.field, self.k, self.coeffs) == (other.field, other.k, other.coeffs)

    def __hash__(self):
        return hash((self.field, self.k, self.coeffs))

    def __repr__(self):
        if self.field.f == 1:
            body = str(self.coeffs[0])
        else:
            parts = []
            for i, c in enumerate(self.coeffs):
                if c:
                    parts.append(str(c) if i == 0 else (f"{c}*x^{i}" if i > 1 else f"{c}*x"))
            body = " + ".join(parts) if parts else "0"
        return f"({body} mod {self.field.p}^{self.k})"

    # -- arithmetic -----------------------------------------------------------

    def _wrap(self, coeffs: Sequence[int]) -> "RingElem":
        pk = self.field.p ** self.k
        return RingElem(self.field, self.k, tuple(c % pk for c in coeffs))

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return self._wrap([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return self._wrap([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "RingElem":
        return self._wrap([-a for a in self.coeffs])

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return self._wrap(self.field._mul_tuples(self.coeffs, other.coeffs))

    def __pow__(self, n: int) -> "RingElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one(self.k)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "RingElem":
        """Inverse of a unit, by inverting mod p and Hensel-doubling precision."""
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        f, p, k = self.field, self.field.p, self.k
        inv = self.reduce_to(1) ** (f.q - 2) if k > 0 else None
        inv = RingElem(f, k, tuple(c % p for c in inv.coeffs))  # lift naively, then refine
        prec = 1
        two = f.elem(2, k)
        while prec < k:
            inv = inv * (two - self * inv)
            prec *= 2
        return inv

    def __truediv__(self, other: "RingElem") -> "RingElem":
        return self * other.inverse()

    def divide_by_pi(self, j: int = 1) -> "RingElem":
        """Exact division by pi^j; precision drops to k - j."""
        pj = self.field.p ** j
        if self.k - j < 1:
            raise ValueError("insufficient precision to divide")
        if any(c % pj for c in self.coeffs):
            raise ValueError(f"element is not divisible by pi^{j}")
        return RingElem(self.field, self.k - j, tuple(c // pj for c in self.coeffs), self.exact_zero)

    def residue_enc(self) -> int:
        """Encoding of the residue-field image, base p."""
        p = self.field.p
        return sum((c % p) * p ** i for i, c in enumerate(self.coeffs))


# -- operations ----------------------------------------------------------------


def valuation(a: RingElem) -> ExtValuation:
    """Largest j with pi^j | a; INFINITY for a declared-exact zero, floor k otherwise."""
    if a.exact_zero:
        return INFINITY
    p = a.field.p
    v = 0
    coeffs = a.coeffs
    while v < a.k:
        pv = p ** (v + 1)
        if any(c % pv for c in coeffs):
            return ExtValuation(v)
        v += 1
    return ExtValuation(a.k, is_floor=True)


def teichmuller(a: RingElem) -> RingElem:
    """The fixed point tau of x -> x^q with tau = a mod p; tau^q = tau at precision k."""
    t = a
    for _ in range(a.k + 1):
        nxt = t ** a.field.q
        if nxt == t:
            return t
        t = nxt
    return t


def _teichmuller_digits(a: RingElem) -> list[RingElem]:
    """Digits tau_j with a = sum_j p^j tau_j; digit j is only defined mod p^(k-j)."""
    digits = []
    cur = a
    for _ in range(a.k):
        tau = teichmuller(cur)
        digits.append(tau)
        if cur.k == 1:
            break
        cur = (cur - tau).divide_by_pi(1)
    return digits


def frobenius(a: RingElem) -> RingElem:
    """Ring Frobenius: p-th power on Teichmuller digits of the digit expansion."""
    f = a.field
    digits = _teichmuller_digits(a)
    out = f.zero(a.k)
    for j, tau in enumerate(digits):
        term = (tau ** f.p).reduce_to(a.k - j).coeffs
        pj = f.p ** j
        out = out + f.elem([c * pj for c in term], a.k)
    return out


def trace(a: RingElem) -> RingElem:
    """Absolute trace to Z/2^k via sum of Frobenius orbits; only used for p = 2."""
    f = a.field
    if f.p != 2:
        raise ValueError("trace is only provided for p = 2")
    acc = a
    cur = a
    for _ in range(f.f - 1):
        cur = frobenius(cur)
        acc = acc + cur
    if any(acc.coeffs[1:]):
        raise AssertionError("trace did not land in the prime subring")
    return RingElem(f.prime_field(), a.k, (acc.coeffs[0],))


def trace_parity(a: RingElem) -> int:
    """Tr(a) mod 2 (p = 2 only); depends only on a mod 2."""
    return trace(a.reduce_to(1) if a.k > 1 else a).coeffs[0] % 2


def is_square_unit(a: RingElem) -> bool:
    """Whether a unit is a square of a unit.

    Odd p: Euler criterion on the residue field.  p = 2 (unramified, k >= 3):
    strip the Teichmuller part tau; a is a square iff a/tau = 1 mod 4 and the
    trace of ((a/tau) - 1)/4 is even, since unit squares mod 8 are exactly
    tau * (1 + 4s) with s of even trace.
    """
    if not a.is_unit():
        raise ValueError("is_square_unit needs a unit")
    f = a.field
    if f.p != 2:
        r = a.reduce_to(1)
        return (r ** ((f.q - 1) // 2)).coeffs == f.one(1).coeffs
    if a.k < 3:
        raise ValueError("p = 2 square test needs precision k >= 3")
    b = a / teichmuller(a)
    bm4 = b.reduce_to(2)
    if bm4 != f.one(2):
        return False
    w = (b.reduce_to(3) - f.one(3)).divide_by_pi(2)
    return trace_parity(w) == 0


def eta(a: RingElem) -> int:
    """Quadratic character on R for odd p: 0 on pi | a, else +-1 by squareness."""
    if a.field.p == 2:
        raise ValueError("eta is defined for odd p only")
    if not a.is_unit():
        return 0
    return 1 if is_square_unit(a) else -1


@lru_cache(maxsize=None)
def _teich_cache(field: FieldDesc, k: int) -> tuple[RingElem, ...]:
    elems = []
    p, f = field.p, field.f
    for code in range(field.q):
        cs = []
        c = code
        for _ in range(f):
            cs.append(c % p)
            c //= p
        elems.append(teichmuller(field.elem(cs, k)))
    return tuple(elems)


def teichmuller_set(field: FieldDesc, k: int) -> tuple[RingElem, ...]:
    """T: 0 and the (q-1)-st roots of unity, ordered by residue encoding."""
    return _teich_cache(field, k)


def trace_zero_teichmullers(field: FieldDesc, k: int) -> tuple[RingElem, ...]:
    """S: the Teichmuller representatives of even absolute trace (p = 2)."""
    return tuple(t for t in teichmuller_set(field, k) if trace_parity(t) == 0)


def pick_nonsquare(field: FieldDesc, k: int) -> RingElem:
    """Least Teichmuller nonresidue (odd p); deterministic across runs."""
    if field.p == 2:
        raise ValueError("pick_nonsquare needs odd p")
    for t in teichmuller_set(field, k):
        if t.is_unit() and eta(t) == -1:
            return t
    raise AssertionError("no nonresidue found")  # pragma: no cover


def pick_xi(field: FieldDesc, k: int) -> RingElem:
    """A unit xi with odd trace, so 1 + 4*xi is a nonsquare unit (p = 2)."""
    if field.p != 2:
        raise ValueError("pick_xi needs p = 2")
    if field.f == 1:
        return field.one(k)
    for t in teichmuller_set(field, k):
        if t.is_unit() and trace_parity(t) == 1:
            return t
    raise AssertionError("no odd-trace unit found")  # pragma: no cover
