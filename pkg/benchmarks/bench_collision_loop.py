"""Benchmark the compiled collision loop against the pure-Python mirror.

Both backends consume identical pre-drawn random arrays, so their outputs
must match bit for bit; the script asserts that before reporting timings.

Usage: python benchmarks/bench_collision_loop.py [n_particles] [n_candidates]
"""

import math
import sys
import time

import numpy as np

from polykin import _loop_py

try:
    from polykin import _loop_c
except ImportError:
    _loop_c = None


def make_inputs(n_particles, n_candidates, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n_particles, 3))
    I = rng.gamma(1.2, size=n_particles)
    ii = rng.integers(0, n_particles, n_candidates, dtype=np.int64)
    jj = rng.integers(0, n_particles - 1, n_candidates, dtype=np.int64)
    jj[jj >= ii] += 1
    uni = rng.random((4, n_candidates))
    phi = 2.0 * math.pi * rng.random(n_candidates)
    tail = (
        uni[0], uni[1], uni[2], uni[3], np.cos(phi), np.sin(phi),
        rng.beta(1.2, 1.2, n_candidates), rng.beta(2.0, 2.4, n_candidates),
        rng.beta(1.7, 1.2, n_candidates), rng.beta(1.5, 2.9, n_candidates),
        1.0, 0.9, 0.4, 0.3, 0.6, 6.0, 12.0, 0.5, 0.4, 200.0,
    )
    return v, I, ii, jj, tail


def time_backend(module, v, I, ii, jj, tail, repeats=5):
    best = math.inf
    out = None
    final = None
    for _ in range(repeats):
        vv, II = v.copy(), I.copy()
        t0 = time.perf_counter()
        out = module.collision_pass(vv, II, ii, jj, *tail)
        best = min(best, time.perf_counter() - t0)
        final = (vv, II)
    return best, tuple(out), final


def main():
    n_particles = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
    n_candidates = int(sys.argv[2]) if len(sys.argv) > 2 else 200_000
    v, I, ii, jj, tail = make_inputs(n_particles, n_candidates)

    t_py, out_py, state_py = time_backend(_loop_py, v, I, ii, jj, tail)
    print(f"python   backend: {t_py * 1e3:8.2f} ms  ({n_candidates / t_py:,.0f} candidates/s)")

    if _loop_c is None:
        print("compiled backend: not available (install with the build extension)")
        return

    t_c, out_c, state_c = time_backend(_loop_c, v, I, ii, jj, tail)
    print(f"compiled backend: {t_c * 1e3:8.2f} ms  ({n_candidates / t_c:,.0f} candidates/s)")

    assert out_py == out_c, f"counter mismatch: {out_py} vs {out_c}"
    assert np.array_equal(state_py[0], state_c[0]), "velocity state diverged"
    assert np.array_equal(state_py[1], state_c[1]), "internal-energy state diverged"
    print(f"outputs bit-identical ({out_c[0]} accepted of {n_candidates} candidates)")
    print(f"speedup: {t_py / t_c:.1f}x")


if __name__ == "__main__":
    main()
