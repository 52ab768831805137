#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the bundled reference scenario on both backends over the same horizon
and reports wall time, steps per second, and the numba speedup, plus the
largest state divergence between the two paths.

    python benchmarks/bench_backends.py --t-end 20 --dt 1e-3
"""

import argparse
import time

import numpy as np

from phformation import load_bundled_scenario
from phformation.integrator import IntegratorConfig, integrate


def time_backend(scenario, config, backend: str, repeats: int):
    # warm-up pays the JIT cost for numba and is fair to both paths
    log = integrate(scenario, config=config, kernel_backend=backend)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        log = integrate(scenario, config=config, kernel_backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, log


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default="triangle", help="bundled config name")
    parser.add_argument("--t-end", type=float, default=20.0)
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    scenario = load_bundled_scenario(args.config)
    config = IntegratorConfig(dt=args.dt, t_end=args.t_end, log_stride=10)
    steps = round(args.t_end / args.dt)

    results = {}
    logs = {}
    for backend in ("numba", "numpy"):
        seconds, log = time_backend(scenario, config, backend, args.repeats)
        results[backend] = seconds
        logs[backend] = log
        print(
            f"{backend:>6}: {seconds:8.3f} s  "
            f"({steps / seconds:12.0f} steps/s, best of {args.repeats})"
        )
    drift_q = np.abs(logs["numba"].positions - logs["numpy"].positions).max()
    drift_p = np.abs(logs["numba"].momenta - logs["numpy"].momenta).max()
    print(f"speedup: {results['numpy'] / results['numba']:.1f}x (numba over numpy)")
    print(f"cross-backend state divergence: |dq|={drift_q:.3e} |dp|={drift_p:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
