"""Compare the numba and pure-numpy kernel paths.

Run: python benchmarks/bench_backends.py --agents 4 1000 100000 --steps 100 10000
"""
import argparse
import time

import numpy as np

from gpuslice import _kernels
from gpuslice.bench import random_agents


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--agents", type=int, nargs="+", default=[4, 1000, 100_000])
    p.add_argument("--steps", type=int, nargs="+", default=[100, 10_000])
    p.add_argument("--repeats", type=int, default=20)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    kernels = {name: _kernels.get_kernels(name) for name in ("numba", "numpy")}

    print("adaptive allocation (per call)")
    for n in args.agents:
        arr, rates = random_agents(n, rng)
        a = (arr.min_gpu_fraction, arr.priority, rates, 1.0)
        kernels["numba"][0](*a)
        t = {k: best_of(lambda f=v[0]: f(*a), args.repeats) for k, v in kernels.items()}
        print(f"  N={n:>7}  numba {t['numba'] * 1e6:10.2f} us  numpy {t['numpy'] * 1e6:10.2f} us  "
              f"speedup {t['numpy'] / t['numba']:6.1f}x")

    print("queue recurrence (4 agents, whole run)")
    tput = np.array([100.0, 50.0, 60.0, 30.0])
    for d in args.steps:
        arrivals = rng.uniform(0, 100, (d, 4))
        alloc = np.tile([0.25, 0.25, 0.25, 0.25], (d, 1))
        a = (arrivals, alloc, tput, 1.0, 0.03, np.zeros(4))
        kernels["numba"][1](*a)
        t = {k: best_of(lambda f=v[1]: f(*a), max(3, args.repeats // 4)) for k, v in kernels.items()}
        print(f"  steps={d:>6}  numba {t['numba'] * 1e3:9.3f} ms  numpy {t['numpy'] * 1e3:9.3f} ms  "
              f"speedup {t['numpy'] / t['numba']:6.1f}x")


if __name__ == "__main__":
    main()
