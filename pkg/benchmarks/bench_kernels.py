"""Time the numba layout kernels against the pure-numpy fallback.

Runs both backends on the same synthetic inputs, reports per-call wall
time and the largest numeric deviation between them. The numba backend
is warmed once per shape so JIT compilation stays out of the timings.

Usage:
    python benchmarks/bench_kernels.py [--sizes 200 500 1000] [--dims 50] [--repeats 5]
"""

import argparse
import time

import numpy as np

from incident_atlas.kernels import get_kernels, resolve_backend_name


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def bench_size(n: int, dims: int, repeats: int, numpy_k, numba_k) -> None:
    rng = np.random.default_rng(20240315)
    x = rng.normal(size=(n, dims))
    y = rng.normal(size=(n, 2))
    p = np.abs(rng.normal(size=(n, n)))
    p = (p + p.T) / 2.0
    np.fill_diagonal(p, 0.0)
    p /= p.sum()

    rows = []
    d_np = numpy_k.pairwise_sq_dists(x)
    t_np = time_call(numpy_k.pairwise_sq_dists, x, repeats=repeats)
    if numba_k is not None:
        d_nb = numba_k.pairwise_sq_dists(x)  # warm-up compiles
        t_nb = time_call(numba_k.pairwise_sq_dists, x, repeats=repeats)
        dev = float(np.abs(d_np - d_nb).max())
        rows.append(("pairwise_sq_dists", t_np, t_nb, dev))
    else:
        rows.append(("pairwise_sq_dists", t_np, None, None))

    g_np = numpy_k.iteration_terms(p, p, y)
    t_np = time_call(numpy_k.iteration_terms, p, p, y, repeats=repeats)
    if numba_k is not None:
        g_nb = numba_k.iteration_terms(p, p, y)
        t_nb = time_call(numba_k.iteration_terms, p, p, y, repeats=repeats)
        dev = max(
            float(np.abs(g_np[0] - g_nb[0]).max()),
            abs(g_np[1] - g_nb[1]),
            abs(g_np[2] - g_nb[2]),
        )
        rows.append(("iteration_terms", t_np, t_nb, dev))
    else:
        rows.append(("iteration_terms", t_np, None, None))

    for name, numpy_s, numba_s, dev in rows:
        if numba_s is None:
            print(f"  {name:<20} numpy {numpy_s * 1e3:8.3f} ms   numba unavailable")
        else:
            speedup = numpy_s / numba_s if numba_s > 0 else float("inf")
            print(
                f"  {name:<20} numpy {numpy_s * 1e3:8.3f} ms   "
                f"numba {numba_s * 1e3:8.3f} ms   x{speedup:5.2f}   "
                f"max dev {dev:.3e}"
            )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000])
    parser.add_argument("--dims", type=int, default=50)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    numpy_k = get_kernels("numpy")
    try:
        numba_k = get_kernels("numba")
    except ImportError:
        numba_k = None
        print("numba not importable; timing the numpy backend alone")
    print(f"default backend for this environment: {resolve_backend_name()}")

    for n in args.sizes:
        print(f"N={n}, D={args.dims}, best of {args.repeats}:")
        bench_size(n, args.dims, args.repeats, numpy_k, numba_k)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
