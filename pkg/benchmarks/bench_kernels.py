"""Compare the compiled and pure-Python graph kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 200 1000 4000] [--repeat 3]

Each size is a random sparse digraph with out-degree about 6 and integer
weights in [-3, 3], plus one box-map graph from the torus flow.  Times are
the best of ``--repeat`` runs, in milliseconds.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lyapform import kernels


def random_graph(n: int, degree: int, seed: int):
    rng = np.random.default_rng(seed)
    m = n * degree
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    w = rng.integers(-3, 4, m)
    return n, src, dst, w


def box_graph(res: int):
    from lyapform import fixtures

    fx = fixtures.example2_uniform(res)
    g = fx.graph
    w = [int(round(float(x) * res)) for x in fx.xi.weights]
    return g.n, g.src, g.dst, np.asarray(w)


def cases(n, src, dst, w):
    w_list = [int(x) for x in w]
    neg = [-abs(x) - 1 for x in w_list]
    nonneg = [abs(x) for x in w_list]
    mask = np.zeros(n, dtype=bool)
    mask[::7] = True
    return {
        "strong_components": lambda: kernels.strong_components(n, src, dst),
        "min_mean_cycle": lambda: kernels.min_mean_cycle(n, src, dst, w_list),
        "longest_from": lambda: kernels.longest_from(n, src, dst, neg),
        "min_cycle_through": lambda: kernels.min_cycle_through(n, src, dst, nonneg, mask),
    }


def best_ms(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best * 1e3


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 4000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--box-res", type=int, default=24)
    args = ap.parse_args(argv)

    graphs = [(f"random n={n}", random_graph(n, 6, seed=n)) for n in args.sizes]
    graphs.append((f"box {args.box_res}x{args.box_res}", box_graph(args.box_res)))
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.backend()})")
    header = f"{'graph':<18}{'kernel':<20}" + "".join(f"{b:>12}" for b in backends)
    if "cython" in backends:
        header += f"{'speedup':>10}"
    print(header)
    for label, g in graphs:
        for name, fn in cases(*g).items():
            times = {}
            for b in backends:
                with kernels.use_backend(b):
                    times[b] = best_ms(fn, args.repeat)
            row = f"{label:<18}{name:<20}" + "".join(f"{times[b]:>12.2f}" for b in backends)
            if "cython" in times:
                row += f"{times['python'] / max(times['cython'], 1e-9):>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
