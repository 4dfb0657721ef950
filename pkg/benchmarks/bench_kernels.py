"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5]
"""
import argparse
import contextlib
import time

import numpy as np

from tensegrity_ptm import kernels
from tensegrity_ptm.atlas import SliceSpec, classify_slice
from tensegrity_ptm.freelength import solve_freelength
from tensegrity_ptm.kernels import compiled_backend, python_backend
from tensegrity_ptm.model import Geometry, Loading

KERNELS = ("trig_residuals", "polish", "minors", "freelength_derivatives", "freelength_newton")
PRM = (1.0, 1.5, 0.7, -0.1, -0.1, 0.0, 0.0)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


@contextlib.contextmanager
def use_backend(mod):
    saved = {k: getattr(kernels, k) for k in KERNELS}
    for k in KERNELS:
        setattr(kernels, k, getattr(mod, k))
    try:
        yield
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def cases(n):
    rng = np.random.default_rng(0)
    a, b = rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n)
    return {
        "trig_residuals": lambda m: m.trig_residuals(PRM, a, b),
        "polish": lambda m: m.polish(PRM, a, b),
        "minors": lambda m: m.minors(PRM, 100.0, a, b),
        "freelength_derivatives": lambda m: m.freelength_derivatives(PRM, 100.0, 0.1, a, b),
        "freelength_newton": lambda m: m.freelength_newton(PRM, 100.0, 0.1, a, b),
    }


def end_to_end():
    g, l = Geometry(1.0, 1.5, 100.0, 0.1), Loading(-10.0, -10.0)
    spec = SliceSpec("rho", (0.01, 2.0), 30, "L2", (0.01, 2.0), 30, fixed={"F3": -10.0, "F4": -10.0})
    return {
        "solve_freelength x20": lambda: [solve_freelength(g, l, r) for r in np.linspace(0.2, 1.5, 20)],
        "classify_slice 30x30": lambda: classify_slice(spec),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="points per kernel call (default 20000)")
    ap.add_argument("--repeat", type=int, default=5, help="repetitions, best time kept (default 5)")
    args = ap.parse_args()

    compiled = compiled_backend()
    if compiled is None:
        print("compiled extension not built; only the python backend is timed")
    backends = [("python", python_backend)] + ([("cython", compiled)] if compiled else [])

    print(f"{'kernel':<26}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for name, fn in cases(args.n).items():
        ts = [best_of(lambda: fn(mod), args.repeat) for _, mod in backends]
        sp = f"{ts[0] / ts[-1]:>9.1f}x" if len(ts) > 1 else ""
        print(f"{name:<26}" + "".join(f"{t * 1e3:>10.2f}ms" for t in ts) + sp)
    for name, fn in end_to_end().items():
        ts = []
        for _, mod in backends:
            with use_backend(mod):
                ts.append(best_of(fn, max(1, args.repeat // 2)))
        sp = f"{ts[0] / ts[-1]:>9.1f}x" if len(ts) > 1 else ""
        print(f"{name:<26}" + "".join(f"{t * 1e3:>10.2f}ms" for t in ts) + sp)


if __name__ == "__main__":
    main()
