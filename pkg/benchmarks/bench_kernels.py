"""Compare the compiled and pure-Python graph kernels.

Runs maximum matching, multi-source BFS and the all-pairs finite diameter on
seeded ER networks and prints median wall times per backend, e.g.::

    python3 benchmarks/bench_kernels.py --sizes 200 1000 5000 --repeats 5
"""
import argparse
import statistics
import time

import numpy as np

from netctl import _kernels_py, generate_er

try:
    from netctl import _kernels as _kernels_cy
except ImportError:  # extension not built
    _kernels_cy = None


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench(n, avg_k, repeats, backends):
    net = generate_er(n, avg_k, 0.5, seed=n)
    ptr, idx = net.csr
    sources = np.arange(0, n, max(1, n // 20), dtype=np.int64)
    rows = []
    for name, mod in backends:
        cases = {
            "matching": lambda: mod.hopcroft_karp(n, ptr, idx),
            "bfs": lambda: mod.bfs_layers(n, ptr, idx, sources),
        }
        if n <= 2000:
            cases["diameter"] = lambda: mod.max_finite_distance(n, ptr, idx)
        for kernel, fn in cases.items():
            rows.append((n, kernel, name, _median_time(fn, repeats)))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 5000])
    p.add_argument("--k", type=float, default=6.0, help="mean degree (default: %(default)s)")
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args(argv)

    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.insert(0, ("cython", _kernels_cy))
    else:
        print("compiled extension not available; timing the Python kernels only")

    results = {}
    for n in args.sizes:
        for n_, kernel, name, t in bench(n, args.k, args.repeats, backends):
            results[(n_, kernel, name)] = t

    print(f"{'n':>6} {'kernel':<9} " + " ".join(f"{b:>11}" for b, _ in backends) + "   speedup")
    for n in args.sizes:
        for kernel in ("matching", "bfs", "diameter"):
            ts = [results.get((n, kernel, b)) for b, _ in backends]
            if ts[0] is None:
                continue
            cells = " ".join(f"{t * 1e3:9.2f}ms" for t in ts)
            speed = f"{ts[-1] / ts[0]:8.1f}x" if len(ts) == 2 else ""
            print(f"{n:>6} {kernel:<9} {cells} {speed}")


if __name__ == "__main__":
    main()
