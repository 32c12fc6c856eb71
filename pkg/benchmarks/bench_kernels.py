"""Compiled vs numpy timings for ``kernels.eval_grid`` on twisted-form coefficients.

    python3 benchmarks/bench_kernels.py [--points 20000 200000] [--repeat 5]
"""
import argparse
import statistics
import time

import numpy as np

from lutzforms import kernels
from lutzforms.constructions import omega_tw, tube_chart
from lutzforms.contact import contact_coefficient


def workload(n: int, points: int, seed: int):
    ch = tube_chart(n)
    exprs = [contact_coefficient(omega_tw(ch))]
    exprs += list(omega_tw(ch).components.values())
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, np.sqrt(np.pi), (points, ch.dim))
    return exprs, pts, ch.dim


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, nargs="+", default=[20_000, 200_000])
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>2} {'points':>8} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8} {'max |diff|':>11}")
    for n in args.dims:
        for count in args.points:
            exprs, pts, dim = workload(n, count, args.seed)
            kernels.eval_grid(exprs, pts[:8], dim=dim, use_numba=True)     # compile outside the timing
            ref, _ = kernels.eval_grid(exprs, pts, dim=dim, use_numba=False)
            got, _ = kernels.eval_grid(exprs, pts, dim=dim, use_numba=True)
            t_np, _ = best_of(lambda: kernels.eval_grid(exprs, pts, dim=dim, use_numba=False), args.repeat)
            t_nb, _ = best_of(lambda: kernels.eval_grid(exprs, pts, dim=dim, use_numba=True), args.repeat)
            diff = float(np.nanmax(np.abs(ref - got)))
            print(f"{n:>2} {count:>8} {1e3 * t_np:>10.2f} {1e3 * t_nb:>10.2f} {t_np / t_nb:>8.2f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
