"""Benchmark the simulation kernel backends.

Runs the same seeded workload through the numba-compiled loop and the pure
numpy/Python fallback, verifies they produce identical trajectories, and
prints a throughput table.

Usage: python benchmarks/bench_kernels.py [--horizon N] [--repeat K]
"""

import argparse
import time

import numpy as np

from tbrw import _kernels, engine, schedules


def build_args(horizon: int, p: float, seed: int):
    state = engine.make_initial("edge")
    rng = np.random.default_rng(seed)
    xi, _ = schedules.bernoulli(p).sample_array(horizon, rng)
    jump_u = rng.random(horizon + 1)
    total = state.tree.node_count + int(xi.sum())
    arrays = engine._state_to_arrays(state, total)
    positions = np.zeros(horizon + 1, dtype=np.int64)
    depths = np.zeros(horizon + 1, dtype=np.int64)
    flags = np.zeros(horizon + 1, dtype=np.bool_)
    return [*arrays, state.tree.node_count, state.position, xi, jump_u,
            positions, depths, flags]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=2_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--p", type=float, default=0.5)
    opts = parser.parse_args()

    backends = _kernels.available_backends()
    print(f"active backend: {_kernels.BACKEND}; "
          f"available: {', '.join(backends)}")

    # warm-up (numba compiles on first call)
    for fn in backends.values():
        fn(*build_args(1000, opts.p, 0))

    reference = None
    rows = []
    for name, fn in backends.items():
        best = float("inf")
        for k in range(opts.repeat):
            args = build_args(opts.horizon, opts.p, seed=1)
            t0 = time.perf_counter()
            fn(*args)
            best = min(best, time.perf_counter() - t0)
        depths = args[12]
        if reference is None:
            reference = depths.copy()
        else:
            assert np.array_equal(depths, reference), \
                "backends disagree on the same seeded workload"
        rows.append((name, best, opts.horizon / best / 1e6))

    print(f"\nhorizon {opts.horizon:,} steps at p={opts.p} "
          f"(best of {opts.repeat}):")
    print(f"{'backend':<10} {'seconds':>10} {'Msteps/s':>10}")
    for name, secs, rate in rows:
        print(f"{name:<10} {secs:>10.3f} {rate:>10.1f}")
    if len(rows) == 2:
        slow = max(r[1] for r in rows)
        fast = min(r[1] for r in rows)
        print(f"\nspeedup: {slow / fast:.1f}x (outputs bit-identical)")


if __name__ == "__main__":
    main()
