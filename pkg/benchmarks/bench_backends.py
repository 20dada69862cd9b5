#!/usr/bin/env python3
"""Throughput comparison of the jit kernels against the pure-numpy fallback.

Times full trials (steps/sec = n-vector arrivals per second) for the power
greedy at n=1024 and the majority rule at n=32.  The informal target is
1e5 steps/sec for the jit path at n=1024; the fallback is expected to be
1-2 orders of magnitude slower and exists for environments without numba,
not for speed.

Run after installing the package:  python3 benchmarks/bench_backends.py
"""

import time

from signbalance.backends import HAS_NUMBA
from signbalance.harness import ExperimentConfig, run_trial

CASES = [
    ("power_greedy", 1024, 20_000),
    ("majority", 32, 200_000),
]


def time_backend(strategy: str, n: int, T: int, backend: str, repeats: int = 3) -> float:
    cfg = ExperimentConfig(strategy=strategy, n=[n], T=[T], trials=1, seed=17)
    run_trial(cfg, 0, backend=backend)  # warm up (jit compile, allocator)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        run_trial(cfg, 0, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return T / best


def main() -> None:
    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    if not HAS_NUMBA:
        print("numba not installed; timing the fallback only")
    print(f"{'strategy':<14} {'n':>6} {'T':>8}  " + "  ".join(f"{b + ' steps/s':>16}" for b in backends))
    for strategy, n, T in CASES:
        rates = [time_backend(strategy, n, T, b) for b in backends]
        cells = "  ".join(f"{r:>16,.0f}" for r in rates)
        print(f"{strategy:<14} {n:>6} {T:>8}  {cells}")
        if len(rates) == 2 and rates[0] > 0:
            print(f"{'':<14} {'':>6} {'':>8}  speedup x{rates[1] / rates[0]:.1f}")


if __name__ == "__main__":
    main()
