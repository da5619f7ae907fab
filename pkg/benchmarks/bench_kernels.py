"""Compare the numba kernels with the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--size N] [--repeat R]``.
The numba timings exclude the first (compiling) call.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from qdsindex import _kernels as K


def _cases(size: int, rng: np.random.Generator):
    mu = np.sort(rng.uniform(0.5, 200.0, size))
    w = rng.normal(size=size) + 1j * rng.normal(size=size)
    ts = np.geomspace(0.02, 0.5, 64)
    x = np.linspace(-1.0, 1.0, size)
    return {
        "heat_sums[abs]": (lambda f: f(w, mu, ts, False), K.heat_sums_numpy, K.heat_sums_jit),
        "heat_sums[gauss]": (lambda f: f(w, mu, ts, True), K.heat_sums_numpy, K.heat_sums_jit),
        "jacobi[n=40]": (lambda f: f(40, 0.5, 1.5, x), K.jacobi_numpy, K.jacobi_jit),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"numba available: {K.HAVE_NUMBA}; size={args.size}")
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, (call, f_np, f_jit) in _cases(args.size, rng).items():
        ref = call(f_np)
        t_np = min(timeit.repeat(lambda: call(f_np), number=1, repeat=args.repeat)) * 1e3
        if not K.HAVE_NUMBA:
            print(f"{name:<18}{t_np:>12.2f}{'-':>12}{'-':>10}{'-':>14}")
            continue
        got = call(f_jit)  # compile
        t_jit = min(timeit.repeat(lambda: call(f_jit), number=1, repeat=args.repeat)) * 1e3
        diff = float(np.max(np.abs(got - ref)))
        print(f"{name:<18}{t_np:>12.2f}{t_jit:>12.2f}{t_np / t_jit:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
