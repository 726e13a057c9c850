"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Inputs are chosen so that no violation exists, forcing each scan to run to
completion.  Prints one row per (kernel, size, backend) with the best time.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from risklens import kernels
from risklens.preferences import oracle_lotteries


def cases(rng):
    for n in (10, 30, 60):
        v = np.sort(rng.uniform(0, 1, n))
        u = np.exp(2 * v)  # convex transform: less risk-averse, no violation
        yield "ordinal", n, (u, v, 1e-12)
        yield "crossratio", n, (u, v, 1e-12)
        yield "lottery", n, (u, v, oracle_lotteries(n, 500, seed=0), 1e-12)
    for k in (10, 100, 1000):
        at = np.sort(rng.uniform(-5, 5, k))
        w = rng.dirichlet(np.ones(k + 1))
        yield "chi_atoms", k, (at, w[1:], float(w[0]), rng.uniform(-6, 6, 10_000))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the pure-Python backend only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'size':>6}  " + "".join(f"{name:>12}" for name in backends) + "   speedup")
    for name, size, inputs in cases(rng):
        best = {}
        for backend, mod in backends.items():
            fn = getattr(mod, name + "_violation" if name != "chi_atoms" else name)
            timer = timeit.Timer(lambda: fn(*inputs))
            number, _ = timer.autorange()
            best[backend] = min(timer.repeat(args.repeat, number)) / number
        cells = "".join(f"{best[b] * 1e3:>10.3f}ms" for b in backends)
        ratio = f"{best['python'] / best['cython']:>9.1f}x" if "cython" in best else ""
        print(f"{name:<12}{size:>6}  {cells}{ratio}")


if __name__ == "__main__":
    main()
