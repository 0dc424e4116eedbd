"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from csrgame import Instance
from csrgame._backend import BACKENDS
from csrgame.graph import gnp_connected, poa_example, random_tree


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    yield "scan poa_example(5,3) 3^12", Instance(poa_example(5, 3), 3), "scan"
    yield "scan random_tree(9) 4^9", Instance(random_tree(9, 1), 4), "scan"
    yield "batch 20k profiles gnp(30)", Instance(gnp_connected(30, 0.15, 2), 4), "batch"
    yield "nearest table x2000 gnp(40)", Instance(gnp_connected(40, 0.1, 3), 5), "table"


def job(kern, inst, kind):
    g = inst.graph
    if kind == "scan":
        total = inst.k ** inst.n
        return lambda: kern.scan_profiles(g.dist, g.diameter, inst.k, 0, total, True)
    rng = np.random.default_rng(0)
    if kind == "batch":
        P = rng.integers(0, inst.k, size=(20000, inst.n))
        return lambda: kern.batch_social_cost(g.dist, g.diameter, inst.k, P)
    P = rng.integers(0, inst.k, size=inst.n)
    return lambda: [kern.exclusive_nearest(g.dist, g.diameter, inst.k, P) for _ in range(2000)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = list(BACKENDS)
    print(f"{'case':34s}" + "".join(f"{n:>12s}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, inst, kind in cases():
        t = {n: best_of(job(BACKENDS[n], inst, kind), args.repeat) for n in names}
        row = f"{label:34s}" + "".join(f"{t[n]:11.4f}s" for n in names)
        if "cython" in t:
            row += f"   {t['python'] / t['cython']:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
