"""Exact univariate polynomials and rational functions in t = q^(-s).

Coefficients are arbitrary-precision rationals.  RationalFunction keeps the
reduced form with denominator constant term 1, which is the normal form every
closed-form zeta statement is phrased in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

__all__ = [
    "Poly",
    "RationalFunction",
    "DenominatorShape",
    "poincare_from_zeta",
    "zeta_from_poincare",
]


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Poly:
    """Dense univariate polynomial over Q, ascending degree, no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_fr(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(c) -> "Poly":
        return Poly([c])

    @staticmethod
    def t(power: int = 1, coeff=1) -> "Poly":
        return Poly([0] * power + [coeff])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] + other[i] for i in range(n)])

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[i] - other[i] for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.coeffs[-1]
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - d] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - d + j] -= c * b
        return Poly(quot), Poly(rem)

    def divides(self, other: "Poly") -> bool:
        _, r = other.divmod(self)
        return r.is_zero()

    def eval(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * _fr(x) + c
        return acc

    def monic_gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        if a.is_zero():
            return a
        return a * (1 / a.coeffs[-1])

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"

    def render(self, var: str = "t") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = _render_frac(mag)
            else:
                tpow = var if i == 1 else f"{var}^{i}"
                body = tpow if mag == 1 else f"{_render_frac(mag)}*{tpow}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)


def _render_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"({c.numerator}/{c.denominator})"


class RationalFunction:
    """Quotient of Polys, always reduced, with den(0) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | int | Fraction, den: Poly | int | Fraction = 1):
        num = num if isinstance(num, Poly) else Poly.const(num)
        den = den if isinstance(den, Poly) else Poly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = self._normalize(num, den)

    @staticmethod
    def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
        if num.is_zero():
            return Poly(), Poly.const(1)
        g = num.monic_gcd(den)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        c0 = den[0]
        if c0 == 0:
            raise ValueError("reduced denominator has a root at t = 0")
        inv = 1 / c0
        return num * inv, den * inv

    def normalize(self) -> "RationalFunction":
        return self  # construction already normalizes; idempotent by contract

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Poly)):
            return self == RationalFunction(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> "RationalFunction":
        other = other if isinstance(other, RationalFunction) else RationalFunction(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        other = other if isinstance(other, RationalFunction) else RationalFunction(other)
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction(other) - self

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, (int, Fraction, Poly)):
            other = RationalFunction(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        if isinstance(other, (int, Fraction, Poly)):
            other = RationalFunction(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return RationalFunction(other) / self

    def eval(self, x) -> Fraction:
        d = self.den.eval(x)
        if d == 0:
            raise ZeroDivisionError("pole")
        return self.num.eval(x) / d

    def series_prefix(self, count: int) -> list[Fraction]:
        """First `count` Taylor coefficients at t = 0, exact."""
        out = []
        dc = self.den.coeffs
        for n in range(count):
            c = self.num[n]
            for j in range(1, min(n, self.den.degree) + 1):
                c -= dc[j] * out[n - j]
            out.append(c)  # den[0] == 1 by the invariant
        return out

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"

    def render(self) -> str:
        num = self.num.render()
        if " " in num:
            num = f"({num})"
        if self.den.degree <= 0:
            return num
        return f"{num} / ({self.den.render()})"

    def to_json(self) -> dict:
        return {
            "numerator": [[str(c.numerator), str(c.denominator)] for c in self.num.coeffs],
            "denominator": [[str(c.numerator), str(c.denominator)] for c in self.den.coeffs],
        }

    @staticmethod
    def from_json(obj: dict) -> "RationalFunction":
        num = Poly([Fraction(int(n), int(d)) for n, d in obj["numerator"]])
        den = Poly([Fraction(int(n), int(d)) for n, d in obj["denominator"]])
        return RationalFunction(num, den)


@dataclass(frozen=True)
class DenominatorShape:
    """Factored form of a reduced zeta denominator.

    Factors are drawn, in recognition order, from
      ("one_minus_t_over_q", e)        : 1 - t/q^e
      ("one_plus_t_over_q", e)         : 1 + t/q^e
      ("one_minus_t2_over_q", e)       : 1 - t^2/q^e
    where e is the integer exponent of q.  The multiset multiplies back to the
    denominator exactly.
    """

    q: int
    factors: tuple[tuple[str, int], ...]

    def factor_poly(self, kind: str, e: int) -> Poly:
        qe = Fraction(self.q) ** e
        if kind == "one_minus_t_over_q":
            return Poly([1, -1 / qe])
        if kind == "one_plus_t_over_q":
            return Poly([1, 1 / qe])
        if kind == "one_minus_t2_over_q":
            return Poly([1, 0, -1 / qe])
        raise ValueError(f"unknown factor kind {kind}")

    def to_poly(self) -> Poly:
        out = Poly.const(1)
        for kind, e in self.factors:
            out = out * self.factor_poly(kind, e)
        return out

    def render(self) -> str:
        if not self.factors:
            return "1"
        names = {
            "one_minus_t_over_q": "(1 - t/q^{})",
            "one_plus_t_over_q": "(1 + t/q^{})",
            "one_minus_t2_over_q": "(1 - t^2/q^{})",
        }
        return " * ".join(names[kind].format(e) for kind, e in self.factors)

    @staticmethod
    def recognize(den: Poly, q: int, rank: int) -> "DenominatorShape":
        """Factor `den` over the candidate pole set; fixed trial order.

        Candidates, tried in order: 1 - t/q, then (rank even) 1 -+ t/q^(rank/2),
        then 1 - t^2/q^rank.  Raises if a remainder other than 1 survives.
        """
        shape = DenominatorShape(q, ())
        candidates: list[tuple[str, int]] = [("one_minus_t_over_q", 1)]
        if rank % 2 == 0 and rank > 0:
            candidates.append(("one_minus_t_over_q", rank // 2))
            candidates.append(("one_plus_t_over_q", rank // 2))
        candidates.append(("one_minus_t2_over_q", rank))
        rem = den
        found: list[tuple[str, int]] = []
        for kind, e in candidates:
            fac = shape.factor_poly(kind, e)
            while fac.divides(rem) and rem.degree > 0:
                found.append((kind, e))
                rem = rem.divmod(fac)[0]
        if rem != Poly.const(1):
            raise ValueError(f"denominator {den!r} does not factor over the candidate set")
        return DenominatorShape(q, tuple(found))


def geometric_unit_ball(q) -> RationalFunction:
    """(1 - 1/q) / (1 - t/q): the zeta function of a single unrestricted variable."""
    q = _fr(q)
    return RationalFunction(Poly([1 - 1 / q]), Poly([1, -1 / q]))


def poincare_from_zeta(z: RationalFunction) -> RationalFunction:
    """P(t) = (1 - t*Z(t)) / (1 - t); takes N_0 = 1."""
    one_minus_t = Poly([1, -1])
    return (RationalFunction(1) - RationalFunction(Poly.t()) * z) / RationalFunction(one_minus_t)


def zeta_from_poincare(p: RationalFunction) -> RationalFunction:
    """Inverse transform: Z(t) = (1 - (1 - t)*P(t)) / t."""
    one_minus_t = RationalFunction(Poly([1, -1]))
    num = RationalFunction(1) - one_minus_t * p
    # num vanishes at t = 0 whenever P(0) = 1; divide out one power of t
    q, r = num.num.divmod(Poly.t())
    if not r.is_zero():
        raise ValueError("input is not a Poincare series (constant term != 1)")
    return RationalFunction(q, num.den)
