"""Compare the compiled and pure-Python kernels on the hot paths.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R]

Reports the best wall time per workload for each available backend and the
speed-up of the compiled one. Outputs of the two backends are checked for
agreement before timing.
"""

import argparse
import sys
import time

import numpy as np

from rulelab import _core


def _counts(rng, k, max_m):
    m = rng.integers(1, max_m + 1, size=k)
    cx = rng.integers(0, m + 1)
    cy = rng.integers(0, m + 1)
    r = rng.integers(np.maximum(0, cx + cy - m), np.minimum(cx, cy) + 1)
    return r, cx, cy, m


def _tids(rng, m, p):
    return np.flatnonzero(rng.random(m) < p).astype(np.int64)


def workloads(size, seed=0):
    rng = np.random.default_rng(seed)
    r, cx, cy, m = _counts(rng, size, 10_000)
    a, b = _tids(rng, 200_000, 0.05), _tids(rng, 200_000, 0.05)
    return {
        "batch_cdf": lambda k: k.batch_cdf(r - 1, cx, cy, m),
        "batch_sf": lambda k: k.batch_sf(r - 1, cx, cy, m),
        "batch_quantile(0.99)": lambda k: k.batch_quantile(0.99, cx, cy, m),
        "scalar hyper_sf x1000": lambda k: [k.hyper_sf(1, 100, 100, 10_000) for _ in range(1000)],
        "intersect x200": lambda k: [k.intersect(a, b) for _ in range(200)],
    }


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=20_000, help="count tuples per batch workload")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = {"python": _core.pure}
    if _core.compiled is not None:
        backends["cython"] = _core.compiled
    else:
        print("compiled extension not built; timing the pure-Python kernel only", file=sys.stderr)

    work = workloads(args.size)
    if "cython" in backends:
        for name, fn in work.items():
            x, y = fn(_core.pure), fn(_core.compiled)
            if isinstance(x, list):
                x, y = x[0], y[0]
            np.testing.assert_allclose(np.asarray(x, float), np.asarray(y, float), rtol=1e-12, err_msg=name)

    print(f"{'workload':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speed-up" if len(backends) > 1 else ""))
    for name, fn in work.items():
        times = {b: best_time(lambda: fn(k), args.repeat) for b, k in backends.items()}
        row = f"{name:<24}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{times['python'] / times['cython']:>12.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
