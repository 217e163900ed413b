"""Time the compiled and the pure-numpy inner loops on the same run.

Usage: python3 benchmarks/bench_kernels.py [--ny 300] [--t-end 5] ...
The compiled row is skipped when numba is not importable.
"""

import argparse
import time

import lgfronts as lg
from lgfronts import kernels


def time_backend(fn, vm, disc, record_every, repeat):
    original = kernels.advance_chunk
    kernels.advance_chunk = fn
    try:
        best = float("inf")
        steps = 0
        for _ in range(repeat):
            t0 = time.perf_counter()
            res = lg.simulate(vm, disc, record_every=record_every)
            best = min(best, time.perf_counter() - t0)
            steps = res.health.steps
        return steps, best
    finally:
        kernels.advance_chunk = original


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ny", type=int, default=300, help="inner grid cells")
    ap.add_argument("--half-width", type=float, default=40.0)
    ap.add_argument("--t-end", type=float, default=5.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    vm = lg.validate_params(lg.ModelParams(a=1.0, b=0.5, d=1.0, mu=1.0,
                                           beta=1.0, h0=2.0))
    disc = lg.Discretization(L=args.half_width, Ny=args.ny, t_end=args.t_end)

    rows = []
    numba_fn = getattr(kernels, "advance_chunk_numba", None)
    if numba_fn is not None:
        time_backend(numba_fn, vm, disc, 1.0, 1)  # compile outside the timing
        rows.append(("numba", *time_backend(numba_fn, vm, disc, 1.0, args.repeat)))
    else:
        print("numba unavailable; timing the numpy path only")
    rows.append(("numpy", *time_backend(kernels.advance_chunk_numpy, vm, disc,
                                        1.0, args.repeat)))

    print(f"{'backend':<8} {'steps':>8} {'seconds':>9} {'steps/sec':>11}")
    for name, steps, secs in rows:
        print(f"{name:<8} {steps:>8} {secs:>9.3f} {steps / secs:>11.0f}")
    if len(rows) == 2:
        print(f"speedup: {rows[1][2] / rows[0][2]:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
