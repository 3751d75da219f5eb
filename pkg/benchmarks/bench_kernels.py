"""Compiled vs pure-Python banded kernel.

    python benchmarks/bench_kernels.py [--sizes 100 1000 4000] [--repeat 5]

Times one pentadiagonal solve at each size with both backends, then a short
range march on the transmission-loss grid.  The fallback is forced for the
march through the WAPEQ_BACKEND environment variable in a subprocess.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from wapeq.banded import BACKEND, solve_banded

MARCH = """
import math
import time
import numpy as np
from wapeq.core import gamma_zero, linear_bottom, make_environment
from wapeq.grid_ops import Grid
from wapeq.solver import run
env = make_environment(1500 / (2 * math.pi * 25), 0.75, complex(0.252252311, -0.0135135138),
                       linear_bottom(200.0, 0.05), gamma_zero, 50.0)
grid = Grid({J}, 60, 50.0)
t0 = time.perf_counter()
run(env, grid, lambda y: np.sin(np.pi * y) + 0j)
print(time.perf_counter() - t0)
"""


def random_system(n, rng):
    diags = rng.normal(size=(5, n)) + 1j * rng.normal(size=(5, n))
    diags[2] += 10.0
    rhs = rng.normal(size=n) + 1j * rng.normal(size=n)
    return diags, rhs


def time_solve(n, backend, repeat, rng):
    diags, rhs = random_system(n, rng)
    number = max(1, 20000 // n) if backend == "compiled" else max(1, 500 // n)
    best = min(timeit.repeat(lambda: solve_banded(diags, 2, 2, rhs, backend=backend), number=number, repeat=repeat))
    return best / number


def time_march(J, backend):
    env = dict(os.environ, WAPEQ_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", MARCH.format(J=J)], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 4000])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--march-J", type=int, default=4000)
    args = parser.parse_args(argv)
    if BACKEND != "compiled":
        sys.exit("compiled extension not built; run `pip install -e .` first")
    rng = np.random.default_rng(0)

    print(f"{'n':>6} | {'compiled [ms]':>13} | {'python [ms]':>11} | {'speedup':>7}")
    for n in args.sizes:
        tc = time_solve(n, "compiled", args.repeat, rng)
        tp = time_solve(n, "python", args.repeat, rng)
        print(f"{n:>6} | {tc * 1e3:>13.3f} | {tp * 1e3:>11.3f} | {tp / tc:>7.1f}")

    tc = time_march(args.march_J, "compiled")
    tp = time_march(args.march_J, "python")
    print(f"\n60 range steps at J={args.march_J}: compiled {tc:.2f} s, python {tp:.2f} s ({tp / tc:.1f}x)")


if __name__ == "__main__":
    main()
