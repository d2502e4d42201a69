"""Reference kernels: numpy-vectorized counting loops.

These are the hot paths of the counting oracle.  The compiled core in
_corehot.pyx implements the same three entry points with plain C loops; either
backend returns identical exact integer arrays.

Conventions: an element of GR(p^m, f) is encoded as sum c_i * (p^m)^i with
coefficients c_i in [0, p^m).  Field data is passed as (p, f, m, modulus
tuple) so the kernels stay independent of the object layer.
"""

from __future__ import annotations

import numpy as np

BACKEND = "reference"

_CHUNK_ELEMS = 4_000_000  # broadcast buffer budget per chunk


def _decode(p: int, f: int, m: int, codes):
    pm = p ** m
    comps = []
    rest = codes
    for _ in range(f):
        comps.append(rest % pm)
        rest = rest // pm
    return comps


def _encode(p: int, f: int, m: int, comps):
    pm = p ** m
    out = comps[0] % pm
    mult = pm
    for c in comps[1:]:
        out = out + (c % pm) * mult
        mult *= pm
    return out


def _mul(p: int, f: int, m: int, modulus, a, b):
    pm = p ** m
    if f == 1:
        return [(a[0] * b[0]) % pm]
    if f == 2:
        m0, m1 = modulus[0], modulus[1]
        c2 = (a[1] * b[1]) % pm
        return [(a[0] * b[0] - c2 * m0) % pm,
                (a[0] * b[1] + a[1] * b[0] - c2 * m1) % pm]
    m0, m1, m2 = modulus[0], modulus[1], modulus[2]
    c0 = a[0] * b[0] % pm
    c1 = (a[0] * b[1] + a[1] * b[0]) % pm
    c2 = (a[0] * b[2] + a[1] * b[1] + a[2] * b[0]) % pm
    c3 = (a[1] * b[2] + a[2] * b[1]) % pm
    c4 = (a[2] * b[2]) % pm
    c1 = (c1 - c4 * m0) % pm
    c2 = (c2 - c4 * m1) % pm
    c3 = (c3 - c4 * m2) % pm
    return [(c0 - c3 * m0) % pm, (c1 - c3 * m1) % pm, (c2 - c3 * m2) % pm]


def _addc(p, f, m, a, b):
    pm = p ** m
    return [(x + y) % pm for x, y in zip(a, b)]


def _const(f, size, coeffs, pm):
    return [np.full(size, c % pm, dtype=np.int64) for c in coeffs]


def hist_poly1(p: int, f: int, m: int, modulus, qa, lin, const) -> np.ndarray:
    """Counts of values of qa*x^2 + lin*x + const over GR(p^m, f)."""
    pm = p ** m
    L = pm ** f
    codes = np.arange(L, dtype=np.int64)
    x = _decode(p, f, m, codes)
    acc = _const(f, L, const, pm)
    if any(c % pm for c in lin):
        acc = _addc(p, f, m, acc, _mul(p, f, m, modulus, _const(f, L, lin, pm), x))
    if any(c % pm for c in qa):
        x2 = _mul(p, f, m, modulus, x, x)
        acc = _addc(p, f, m, acc, _mul(p, f, m, modulus, _const(f, L, qa, pm), x2))
    values = _encode(p, f, m, acc)
    return np.bincount(values, minlength=L)


def hist_poly2(p: int, f: int, m: int, modulus, axx, axy, ayy, bx, by, const) -> np.ndarray:
    """Counts of values of axx*x^2 + axy*x*y + ayy*y^2 + bx*x + by*y + const."""
    pm = p ** m
    L = pm ** f
    y_codes = np.arange(L, dtype=np.int64)
    y = _decode(p, f, m, y_codes)
    # the y-only part is reused for every x
    y_part = _const(f, L, const, pm)
    if any(c % pm for c in by):
        y_part = _addc(p, f, m, y_part, _mul(p, f, m, modulus, _const(f, L, by, pm), y))
    if any(c % pm for c in ayy):
        y2 = _mul(p, f, m, modulus, y, y)
        y_part = _addc(p, f, m, y_part, _mul(p, f, m, modulus, _const(f, L, ayy, pm), y2))
    have_axy = any(c % pm for c in axy)
    axy_y = _mul(p, f, m, modulus, _const(f, L, axy, pm), y) if have_axy else None
    out = np.zeros(L, dtype=np.int64)
    x_codes = np.arange(L, dtype=np.int64)
    xc_all = _decode(p, f, m, x_codes)
    chunk = max(1, _CHUNK_ELEMS // L)
    for lo in range(0, L, chunk):
        hi = min(L, lo + chunk)
        xs = [c[lo:hi] for c in xc_all]
        # per-x scalar part: axx*x^2 + bx*x
        sc = [np.zeros(hi - lo, dtype=np.int64) for _ in range(f)]
        if any(c % pm for c in bx):
            sc = _addc(p, f, m, sc, _mul(p, f, m, modulus, _const(f, hi - lo, bx, pm), xs))
        if any(c % pm for c in axx):
            xx = _mul(p, f, m, modulus, xs, xs)
            sc = _addc(p, f, m, sc, _mul(p, f, m, modulus, _const(f, hi - lo, axx, pm), xx))
        # broadcast: value[i, j] over x-chunk i, y j
        vals = [(s[:, None] + yp[None, :]) % pm for s, yp in zip(sc, y_part)]
        if have_axy:
            cross = _mul(p, f, m, modulus,
                         [x[:, None] for x in xs], [ay[None, :] for ay in axy_y])
            vals = [(v + cr) % pm for v, cr in zip(vals, cross)]
        codes = _encode(p, f, m, vals)
        out += np.bincount(codes.ravel(), minlength=L)
    return out


def dot_shifted(h1: np.ndarray, h2: np.ndarray, gather: np.ndarray) -> int:
    """Exact sum over v of h1[v] * h2[gather[v]] as a Python int.

    Splits the factors adaptively so every partial numpy dot stays inside
    int64; the true result is reassembled from shifted partials.
    """
    return exact_dot(h1, h2[gather])


def exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    if a.size == 0:
        return 0
    lbits = int(a.size).bit_length()
    abits = int(a.max()).bit_length()
    bbits = int(b.max()).bit_length()
    if abits + bbits + lbits <= 62:
        return int(np.dot(a, b))
    sa, sb = abits // 2, bbits // 2
    if (abits - sa) + (bbits - sb) + lbits > 62:
        raise OverflowError("histogram magnitudes exceed the exact-dot budget")
    a_hi, a_lo = a >> sa, a & ((1 << sa) - 1)
    b_hi, b_lo = b >> sb, b & ((1 << sb) - 1)
    return ((int(np.dot(a_hi, b_hi)) << (sa + sb))
            + (int(np.dot(a_hi, b_lo)) << sa)
            + (int(np.dot(a_lo, b_hi)) << sb)
            + int(np.dot(a_lo, b_lo)))


def masked_sum(h: np.ndarray, mask: np.ndarray) -> int:
    """Exact sum of h over a boolean mask as a Python int."""
    sel = h[mask]
    hi = int((sel >> 31).sum())
    lo = int((sel & 0x7FFFFFFF).sum())
    return (hi << 31) + lo
