"""Integer encodings of R/pi^m elements for vectorized arithmetic.

An element with coefficient tuple (c_0, ..., c_{f-1}), each c_i in [0, p^m),
is encoded as sum c_i * (p^m)^i.  All component arithmetic is numpy int64;
the largest intermediate is a product of two coefficients (< (5^8)^2, far
inside int64) plus small modulus multiples.
"""

from __future__ import annotations

import numpy as np

from .fields import FieldDesc

__all__ = [
    "ring_size",
    "decode",
    "encode",
    "encode_tuple",
    "decode_int",
    "vec_add",
    "vec_neg",
    "vec_mul",
    "vec_scale",
    "valuation_table",
]


def ring_size(field: FieldDesc, m: int) -> int:
    return (field.p ** m) ** field.f


def decode(field: FieldDesc, m: int, codes: np.ndarray) -> list[np.ndarray]:
    pm = field.p ** m
    comps = []
    rest = codes.astype(np.int64, copy=True)
    for _ in range(field.f):
        comps.append(rest % pm)
        rest = rest // pm
    return comps


def encode(field: FieldDesc, m: int, comps) -> np.ndarray:
    pm = field.p ** m
    out = np.zeros_like(comps[0])
    mult = 1
    for c in comps:
        out = out + (c % pm) * mult
        mult *= pm
    return out


def encode_tuple(field: FieldDesc, m: int, coeffs) -> int:
    pm = field.p ** m
    return sum((int(c) % pm) * pm ** i for i, c in enumerate(coeffs))


def decode_int(field: FieldDesc, m: int, code: int) -> tuple[int, ...]:
    pm = field.p ** m
    out = []
    for _ in range(field.f):
        out.append(code % pm)
        code //= pm
    return tuple(out)


def vec_add(field: FieldDesc, m: int, a, b):
    pm = field.p ** m
    return [(x + y) % pm for x, y in zip(a, b)]


def vec_neg(field: FieldDesc, m: int, a):
    pm = field.p ** m
    return [(-x) % pm for x in a]


def vec_scale(field: FieldDesc, m: int, a, scalar: int):
    pm = field.p ** m
    return [(x * (scalar % pm)) % pm for x in a]


def vec_mul(field: FieldDesc, m: int, a, b):
    """Componentwise product in GR(p^m, f) = (Z/p^m)[x]/(modulus)."""
    pm = field.p ** m
    f = field.f
    if f == 1:
        return [(a[0] * b[0]) % pm]
    if f == 2:
        m0, m1 = field.modulus[0], field.modulus[1]
        c0 = a[0] * b[0]
        c1 = a[0] * b[1] + a[1] * b[0]
        c2 = (a[1] * b[1]) % pm
        # x^2 = -(m0 + m1 x)
        return [(c0 - c2 * m0) % pm, (c1 - c2 * m1) % pm]
    if f == 3:
        m0, m1, m2 = field.modulus[0], field.modulus[1], field.modulus[2]
        c0 = a[0] * b[0] % pm
        c1 = (a[0] * b[1] + a[1] * b[0]) % pm
        c2 = (a[0] * b[2] + a[1] * b[1] + a[2] * b[0]) % pm
        c3 = (a[1] * b[2] + a[2] * b[1]) % pm
        c4 = (a[2] * b[2]) % pm
        # x^4 = -(m0 x + m1 x^2 + m2 x^3), then x^3 = -(m0 + m1 x + m2 x^2)
        c1 = (c1 - c4 * m0) % pm
        c2 = (c2 - c4 * m1) % pm
        c3 = (c3 - c4 * m2) % pm
        c0 = (c0 - c3 * m0) % pm
        c1 = (c1 - c3 * m1) % pm
        c2 = (c2 - c3 * m2) % pm
        return [c0, c1, c2]
    raise ValueError("f must be <= 3")


def valuation_table(field: FieldDesc, m: int) -> np.ndarray:
    """Per-code minimum p-adic valuation of the components, capped at m."""
    codes = np.arange(ring_size(field, m), dtype=np.int64)
    comps = decode(field, m, codes)
    val = np.full(codes.shape, m, dtype=np.int64)
    for e in range(m - 1, -1, -1):
        pe1 = field.p ** (e + 1)
        mask = np.zeros(codes.shape, dtype=bool)
        for c in comps:
            mask |= (c % pe1) != 0
        val[mask] = e
    return val
