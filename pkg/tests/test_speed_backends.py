"""Both kernel backends must return identical exact results."""

import numpy as np
import pytest

from padiczeta import _speed
from padiczeta._speed import _ref

CASES = [
    (2, 1, 5, (0, 1)),
    (2, 2, 3, (1, 1, 1)),
    (2, 3, 2, (1, 1, 0, 1)),
    (3, 1, 4, (0, 1)),
    (3, 2, 2, (1, 0, 1)),
    (5, 1, 3, (0, 1)),
    (7, 1, 2, (0, 1)),
]


def _rand_coeffs(rng, pm, f, count):
    return [tuple(int(x) for x in rng.integers(0, pm, f)) for _ in range(count)]


@pytest.mark.parametrize("p,f,m,modulus", CASES)
def test_hist_kernels_agree(p, f, m, modulus):
    if _speed._impl is _ref:
        pytest.skip("compiled core not built")
    rng = np.random.default_rng(p * 100 + f * 10 + m)
    pm = p ** m
    for trial in range(3):
        qa, lin, cst = _rand_coeffs(rng, pm, f, 3)
        a = _speed._impl.hist_poly1(p, f, m, modulus, qa, lin, cst)
        b = _ref.hist_poly1(p, f, m, modulus, qa, lin, cst)
        assert np.array_equal(a, b)
        co = _rand_coeffs(rng, pm, f, 6)
        a = _speed._impl.hist_poly2(p, f, m, modulus, *co)
        b = _ref.hist_poly2(p, f, m, modulus, *co)
        assert np.array_equal(a, b)
        assert int(a.sum()) == (pm ** f) ** 2


def test_exact_dot_agrees_at_large_magnitudes():
    rng = np.random.default_rng(42)
    for bits_a, bits_b, n in [(40, 40, 500), (56, 20, 2000), (30, 60, 300), (5, 5, 7)]:
        h1 = rng.integers(0, 1 << bits_a, n).astype(np.int64)
        h2 = rng.integers(0, 1 << bits_b, n).astype(np.int64)
        g = rng.permutation(n).astype(np.int64)
        want = sum(int(x) * int(h2[gi]) for x, gi in zip(h1, g))
        assert _ref.dot_shifted(h1, h2, g) == want
        assert _speed.dot_shifted(h1, h2, g) == want


def test_masked_sum_agrees():
    rng = np.random.default_rng(7)
    h = rng.integers(0, 1 << 55, 4096).astype(np.int64)
    mask = rng.random(4096) < 0.4
    want = sum(int(x) for x in h[mask])
    assert _ref.masked_sum(h, mask) == want
    assert _speed.masked_sum(h, mask) == want
