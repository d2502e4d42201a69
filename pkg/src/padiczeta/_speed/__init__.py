"""Kernel backend selection: compiled extension when available, else the
numpy reference implementation.  Both expose hist_poly1, hist_poly2,
dot_shifted, exact_dot, masked_sum with identical exact results."""

from __future__ import annotations

import os

import numpy as np

from . import _ref

if os.environ.get("PADICZETA_FORCE_REFERENCE"):  # pragma: no cover
    _impl = _ref
    BACKEND = "reference"
else:
    try:  # pragma: no cover - depends on the build environment
        from . import _corehot as _impl

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover
        _impl = _ref
        BACKEND = "reference"


def hist_poly1(p, f, m, modulus, qa, lin, const):
    return _impl.hist_poly1(p, f, m, modulus, qa, lin, const)


def hist_poly2(p, f, m, modulus, axx, axy, ayy, bx, by, const):
    return _impl.hist_poly2(p, f, m, modulus, axx, axy, ayy, bx, by, const)


def dot_shifted(h1, h2, gather):
    return _impl.dot_shifted(np.ascontiguousarray(h1), np.ascontiguousarray(h2),
                             np.ascontiguousarray(gather))


def exact_dot(a, b):
    return _impl.exact_dot(np.ascontiguousarray(a), np.ascontiguousarray(b))


def masked_sum(h, mask):
    if _impl is _ref:
        return _ref.masked_sum(h, mask)
    return _impl.masked_sum(np.ascontiguousarray(h),
                            np.ascontiguousarray(mask, dtype=np.uint8))


def reference():
    """The reference backend module (for benchmarks and cross-checks)."""
    return _ref


def active_backend() -> str:
    return BACKEND
