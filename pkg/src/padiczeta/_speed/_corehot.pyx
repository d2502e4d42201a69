# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels: same contracts as _ref.py, plain C loops.

Elements of GR(p^m, f) are encoded as sum c_i * (p^m)^i; multiplication
reduces by the degree-f modulus.  Accumulators use 128-bit integers so the
results are exact Python ints.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

ctypedef long long i64
ctypedef unsigned long long u64

cdef extern from *:
    ctypedef unsigned long long u128 "__uint128_t"


cdef struct GRCtx:
    i64 pm
    i64 mask  # pm - 1 when pm is a power of two, else 0
    bint pow2
    int f
    i64 m0
    i64 m1
    i64 m2


cdef inline i64 _pmod(GRCtx* ctx, i64 x) nogil:
    if ctx.pow2:
        return x & ctx.mask
    x = x % ctx.pm
    if x < 0:
        x += ctx.pm
    return x


cdef inline void _gr_mul(GRCtx* ctx, i64* a, i64* b, i64* out) nogil:
    cdef i64 c0, c1, c2, c3, c4
    if ctx.f == 1:
        out[0] = _pmod(ctx, a[0] * b[0])
        return
    if ctx.f == 2:
        c2 = _pmod(ctx, a[1] * b[1])
        out[0] = _pmod(ctx, a[0] * b[0] - c2 * ctx.m0)
        out[1] = _pmod(ctx, a[0] * b[1] + a[1] * b[0] - c2 * ctx.m1)
        return
    c0 = _pmod(ctx, a[0] * b[0])
    c1 = _pmod(ctx, a[0] * b[1] + a[1] * b[0])
    c2 = _pmod(ctx, a[0] * b[2] + a[1] * b[1] + a[2] * b[0])
    c3 = _pmod(ctx, a[1] * b[2] + a[2] * b[1])
    c4 = _pmod(ctx, a[2] * b[2])
    c1 = _pmod(ctx, c1 - c4 * ctx.m0)
    c2 = _pmod(ctx, c2 - c4 * ctx.m1)
    c3 = _pmod(ctx, c3 - c4 * ctx.m2)
    out[0] = _pmod(ctx, c0 - c3 * ctx.m0)
    out[1] = _pmod(ctx, c1 - c3 * ctx.m1)
    out[2] = _pmod(ctx, c2 - c3 * ctx.m2)


cdef inline void _decode1(GRCtx* ctx, i64 code, i64* out) nogil:
    cdef int i
    for i in range(ctx.f):
        out[i] = code % ctx.pm
        code = code // ctx.pm


cdef inline i64 _encode1(GRCtx* ctx, i64* comps) nogil:
    cdef i64 out = 0
    cdef i64 mult = 1
    cdef int i
    for i in range(ctx.f):
        out += comps[i] * mult
        mult *= ctx.pm
    return out


cdef GRCtx _make_ctx(int p, int f, int m, modulus):
    cdef GRCtx ctx
    ctx.pm = p ** m
    ctx.pow2 = (p == 2)
    ctx.mask = ctx.pm - 1 if ctx.pow2 else 0
    ctx.f = f
    ctx.m0 = modulus[0] % ctx.pm
    ctx.m1 = modulus[1] % ctx.pm if f >= 2 else 0
    ctx.m2 = modulus[2] % ctx.pm if f >= 3 else 0
    return ctx


def hist_poly1(int p, int f, int m, modulus, qa, lin, cst):
    """Counts of values of qa*x^2 + lin*x + const over GR(p^m, f)."""
    cdef GRCtx ctx = _make_ctx(p, f, m, modulus)
    cdef i64 L = ctx.pm ** f
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(L, dtype=np.int64)
    cdef i64[:] ov = out
    cdef i64 aq[3]
    cdef i64 bl[3]
    cdef i64 cc[3]
    cdef i64 x[3]
    cdef i64 x2[3]
    cdef i64 t1[3]
    cdef i64 val[3]
    cdef int i
    for i in range(f):
        aq[i] = _pmod(&ctx, qa[i])
        bl[i] = _pmod(&ctx, lin[i])
        cc[i] = _pmod(&ctx, cst[i])
    cdef bint have_q = False
    cdef bint have_l = False
    for i in range(f):
        if aq[i]:
            have_q = True
        if bl[i]:
            have_l = True
    cdef i64 code
    with nogil:
        for code in range(L):
            _decode1(&ctx, code, x)
            for i in range(ctx.f):
                val[i] = cc[i]
            if have_l:
                _gr_mul(&ctx, bl, x, t1)
                for i in range(ctx.f):
                    val[i] = _pmod(&ctx, val[i] + t1[i])
            if have_q:
                _gr_mul(&ctx, x, x, x2)
                _gr_mul(&ctx, aq, x2, t1)
                for i in range(ctx.f):
                    val[i] = _pmod(&ctx, val[i] + t1[i])
            ov[_encode1(&ctx, val)] += 1
    return out


def hist_poly2(int p, int f, int m, modulus, axx, axy, ayy, bx, by, cst):
    """Counts of values of axx x^2 + axy xy + ayy y^2 + bx x + by y + cst."""
    cdef GRCtx ctx = _make_ctx(p, f, m, modulus)
    cdef i64 L = ctx.pm ** f
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(L, dtype=np.int64)
    cdef i64[:] ov = out
    cdef i64 ca[3]
    cdef i64 cxy[3]
    cdef i64 cy[3]
    cdef i64 cbx[3]
    cdef i64 cby[3]
    cdef i64 cc[3]
    cdef int i
    for i in range(f):
        ca[i] = _pmod(&ctx, axx[i])
        cxy[i] = _pmod(&ctx, axy[i])
        cy[i] = _pmod(&ctx, ayy[i])
        cbx[i] = _pmod(&ctx, bx[i])
        cby[i] = _pmod(&ctx, by[i])
        cc[i] = _pmod(&ctx, cst[i])
    # per-y tables: ypart = ayy y^2 + by y + cst and ay = axy * y, flat per component
    cdef cnp.ndarray[cnp.int64_t, ndim=1] yp0a = np.zeros(L, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] yp1a = np.zeros(L, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] yp2a = np.zeros(L, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ay0a = np.zeros(L, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ay1a = np.zeros(L, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ay2a = np.zeros(L, dtype=np.int64)
    cdef i64[:] yp0 = yp0a
    cdef i64[:] yp1 = yp1a
    cdef i64[:] yp2 = yp2a
    cdef i64[:] ay0 = ay0a
    cdef i64[:] ay1 = ay1a
    cdef i64[:] ay2 = ay2a
    cdef i64 y[3]
    cdef i64 y2[3]
    cdef i64 t1[3]
    cdef i64 acc[3]
    cdef i64 ycode
    with nogil:
        for ycode in range(L):
            _decode1(&ctx, ycode, y)
            for i in range(ctx.f):
                acc[i] = cc[i]
            _gr_mul(&ctx, cby, y, t1)
            for i in range(ctx.f):
                acc[i] = _pmod(&ctx, acc[i] + t1[i])
            _gr_mul(&ctx, y, y, y2)
            _gr_mul(&ctx, cy, y2, t1)
            for i in range(ctx.f):
                acc[i] = _pmod(&ctx, acc[i] + t1[i])
            _gr_mul(&ctx, cxy, y, t1)
            yp0[ycode] = acc[0]
            ay0[ycode] = t1[0]
            if ctx.f >= 2:
                yp1[ycode] = acc[1]
                ay1[ycode] = t1[1]
            if ctx.f >= 3:
                yp2[ycode] = acc[2]
                ay2[ycode] = t1[2]
    cdef i64 x[3]
    cdef i64 xx[3]
    cdef i64 xpart[3]
    cdef i64 xcode
    cdef i64 pm = ctx.pm
    cdef i64 mask = ctx.mask
    cdef bint pow2 = ctx.pow2
    cdef i64 x0, x1, x2, xp0, xp1, xp2, v0, v1, v2, w0, w1, w2, code
    cdef i64 mm0 = ctx.m0
    cdef i64 mm1 = ctx.m1
    cdef i64 mm2 = ctx.m2
    cdef bint have_cross = False
    for i in range(f):
        if cxy[i]:
            have_cross = True
    with nogil:
        for xcode in range(L):
            _decode1(&ctx, xcode, x)
            _gr_mul(&ctx, x, x, xx)
            _gr_mul(&ctx, ca, xx, xpart)
            _gr_mul(&ctx, cbx, x, t1)
            if ctx.f == 1:
                xp0 = xpart[0] + t1[0]
                x0 = x[0]
                if pow2:
                    if have_cross:
                        for ycode in range(L):
                            code = (xp0 + yp0[ycode] + x0 * ay0[ycode]) & mask
                            ov[code] += 1
                    else:
                        for ycode in range(L):
                            code = (xp0 + yp0[ycode]) & mask
                            ov[code] += 1
                else:
                    if have_cross:
                        for ycode in range(L):
                            code = (xp0 + yp0[ycode] + x0 * ay0[ycode]) % pm
                            ov[code] += 1
                    else:
                        for ycode in range(L):
                            code = (xp0 + yp0[ycode]) % pm
                            ov[code] += 1
            elif ctx.f == 2:
                xp0 = _pmod(&ctx, xpart[0] + t1[0])
                xp1 = _pmod(&ctx, xpart[1] + t1[1])
                x0 = x[0]
                x1 = x[1]
                if pow2:
                    for ycode in range(L):
                        w0 = ay0[ycode]
                        w1 = ay1[ycode]
                        v2 = (x1 * w1) & mask
                        v0 = (xp0 + yp0[ycode] + x0 * w0 - v2 * mm0) & mask
                        v1 = (xp1 + yp1[ycode] + x0 * w1 + x1 * w0 - v2 * mm1) & mask
                        ov[v0 + v1 * pm] += 1
                else:
                    for ycode in range(L):
                        w0 = ay0[ycode]
                        w1 = ay1[ycode]
                        v2 = (x1 * w1) % pm
                        v0 = (xp0 + yp0[ycode] + x0 * w0 - v2 * mm0) % pm
                        if v0 < 0:
                            v0 += pm
                        v1 = (xp1 + yp1[ycode] + x0 * w1 + x1 * w0 - v2 * mm1) % pm
                        if v1 < 0:
                            v1 += pm
                        ov[v0 + v1 * pm] += 1
            else:
                xp0 = _pmod(&ctx, xpart[0] + t1[0])
                xp1 = _pmod(&ctx, xpart[1] + t1[1])
                xp2 = _pmod(&ctx, xpart[2] + t1[2])
                x0 = x[0]
                x1 = x[1]
                x2 = x[2]
                for ycode in range(L):
                    w0 = ay0[ycode]
                    w1 = ay1[ycode]
                    w2 = ay2[ycode]
                    # product (x0 + x1 T + x2 T^2)(w0 + w1 T + w2 T^2) reduced
                    v0 = x0 * w0
                    v1 = x0 * w1 + x1 * w0
                    v2 = _pmod(&ctx, x0 * w2 + x1 * w1 + x2 * w0)
                    w0 = _pmod(&ctx, x1 * w2 + x2 * w1)  # degree 3
                    w1 = _pmod(&ctx, x2 * w2)            # degree 4
                    v1 = v1 - w1 * mm0
                    v2 = _pmod(&ctx, v2 - w1 * mm1)
                    w0 = _pmod(&ctx, w0 - w1 * mm2)
                    v0 = _pmod(&ctx, xp0 + yp0[ycode] + v0 - w0 * mm0)
                    v1 = _pmod(&ctx, xp1 + yp1[ycode] + v1 - w0 * mm1)
                    v2 = _pmod(&ctx, xp2 + yp2[ycode] + v2 - w0 * mm2)
                    ov[v0 + (v1 + v2 * pm) * pm] += 1
    return out


cdef object _int128_to_py(u128 acc):
    cdef u64 lo = <u64> (acc & <u128> 0xFFFFFFFFFFFFFFFFULL)
    cdef u64 hi = <u64> (acc >> 64)
    return (int(hi) << 64) + int(lo)


def dot_shifted(cnp.ndarray[cnp.int64_t, ndim=1] h1,
                cnp.ndarray[cnp.int64_t, ndim=1] h2,
                cnp.ndarray[cnp.int64_t, ndim=1] gather):
    """Exact sum over v of h1[v] * h2[gather[v]]."""
    cdef i64[:] a = h1
    cdef i64[:] b = h2
    cdef i64[:] g = gather
    cdef u128 acc = 0
    cdef Py_ssize_t v
    with nogil:
        for v in range(a.shape[0]):
            acc += <u128> (<u64> a[v]) * <u64> b[g[v]]
    return _int128_to_py(acc)


def exact_dot(cnp.ndarray[cnp.int64_t, ndim=1] h1,
              cnp.ndarray[cnp.int64_t, ndim=1] h2):
    cdef i64[:] a = h1
    cdef i64[:] b = h2
    cdef u128 acc = 0
    cdef Py_ssize_t v
    with nogil:
        for v in range(a.shape[0]):
            acc += <u128> (<u64> a[v]) * <u64> b[v]
    return _int128_to_py(acc)


def masked_sum(cnp.ndarray[cnp.int64_t, ndim=1] h,
               cnp.ndarray[cnp.uint8_t, ndim=1] mask):
    """Exact sum of h over a boolean mask."""
    cdef i64[:] a = h
    cdef cnp.uint8_t[:] mk = mask
    cdef u128 acc = 0
    cdef Py_ssize_t v
    with nogil:
        for v in range(a.shape[0]):
            if mk[v]:
                acc += <u64> a[v]
    return _int128_to_py(acc)
