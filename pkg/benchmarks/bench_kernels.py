"""Benchmark the compiled kernels against the pure-NumPy fallback.

Both backends expose the same two hot functions: lbp_codes (per-pixel
local binary patterns) and assign_labels (nearest-centroid assignment).
Run with `python3 benchmarks/bench_kernels.py`. Outputs are checked for
bit-identity before timing, so the numbers compare equal work.
"""

import time

import numpy as np

from floodlens.kernels import _pure

try:
    from floodlens.kernels import _core
except ImportError:
    _core = None


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_lbp(size):
    rng = np.random.default_rng(0)
    gray = rng.integers(0, 256, (size, size), dtype=np.uint8)
    rows = []
    for radius in (1, 2):
        pure_t = _time(_pure.lbp_codes, gray, radius)
        if _core is not None:
            core_out = _core.lbp_codes(gray, radius)
            assert np.array_equal(core_out, _pure.lbp_codes(gray, radius))
            core_t = _time(_core.lbp_codes, gray, radius)
        else:
            core_t = None
        rows.append((f"lbp_codes {size}x{size} r={radius}", pure_t, core_t))
    return rows


def bench_assign(n_points, dim, k):
    rng = np.random.default_rng(1)
    points = rng.random((n_points, dim))
    centroids = rng.random((k, dim))
    pure_t = _time(_pure.assign_labels, points, centroids)
    if _core is not None:
        core_labels, core_dists = _core.assign_labels(points, centroids)
        pure_labels, pure_dists = _pure.assign_labels(points, centroids)
        assert np.array_equal(core_labels, pure_labels)
        assert np.array_equal(core_dists, pure_dists)
        core_t = _time(_core.assign_labels, points, centroids)
    else:
        core_t = None
    return [(f"assign_labels n={n_points} d={dim} k={k}", pure_t, core_t)]


def main():
    if _core is None:
        print("compiled backend unavailable; timing pure backend only\n")
    rows = []
    for size in (256, 1024):
        rows.extend(bench_lbp(size))
    rows.extend(bench_assign(100_000, 4, 3))
    rows.extend(bench_assign(500_000, 4, 4))

    header = f"{'case':<36} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, pure_t, core_t in rows:
        if core_t is None:
            print(f"{name:<36} {pure_t * 1e3:>10.2f} {'n/a':>14} {'n/a':>8}")
        else:
            print(f"{name:<36} {pure_t * 1e3:>10.2f} {core_t * 1e3:>14.2f} "
                  f"{pure_t / core_t:>7.1f}x")


if __name__ == "__main__":
    main()
