"""Compare the compiled counting core against the numpy reference backend.

Usage:  python benchmarks/bench_backends.py [--levels 5 6 7]

Times the three hot kernels on representative workloads (the level-m value
histogram of a plane block over GR(2^m, 2) dominates real runs) and checks
that both backends return identical arrays / integers.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from padiczeta import _speed  # noqa: E402
from padiczeta._speed import _ref  # noqa: E402


def _time(fn, *args, repeat=1):
    best = None
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return out, best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--levels", type=int, nargs="*", default=[5, 6, 7])
    args = parser.parse_args()

    compiled = _speed._impl
    if compiled is _ref:
        print("compiled core not built; benchmarking the reference against itself")
    print(f"active backend: {_speed.active_backend()}\n")
    print(f"{'kernel':34s} {'size':>12s} {'compiled':>10s} {'reference':>10s} {'speedup':>8s}")

    rows = []
    for m in args.levels:
        co = ((0, 0), (2, 0), (0, 0), (0, 0), (0, 0), (0, 0))  # the plane 2xy
        a, ta = _time(compiled.hist_poly2, 2, 2, m, (1, 1), *co)
        b, tb = _time(_ref.hist_poly2, 2, 2, m, (1, 1), *co)
        assert np.array_equal(a, b)
        rows.append((f"hist_poly2 GR(2^{m},2) plane", (4 ** m) ** 2, ta, tb))

    for m in args.levels:
        pm = 5 ** m
        qa, lin, cst = (2,), (0,), (0,)
        a, ta = _time(compiled.hist_poly1, 5, 1, m, (0, 1), qa, lin, cst, repeat=3)
        b, tb = _time(_ref.hist_poly1, 5, 1, m, (0, 1), qa, lin, cst, repeat=3)
        assert np.array_equal(a, b)
        rows.append((f"hist_poly1 Z/5^{m} square", pm, ta, tb))

    rng = np.random.default_rng(7)
    for size in (1 << 16, 5 ** 7):
        h1 = rng.integers(0, 1 << 40, size).astype(np.int64)
        h2 = rng.integers(0, 1 << 40, size).astype(np.int64)
        g = rng.permutation(size).astype(np.int64)
        a, ta = _time(_speed.dot_shifted, h1, h2, g, repeat=5)
        b, tb = _time(_ref.dot_shifted, h1, h2, g, repeat=5)
        assert a == b
        rows.append((f"dot_shifted n={size}", size, ta, tb))

    for name, size, ta, tb in rows:
        print(f"{name:34s} {size:12d} {ta:9.3f}s {tb:9.3f}s {tb / ta:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
