#!/usr/bin/env python3
"""Time the compiled sweep kernels against the pure-Python fallback.

Both backends are driven through the regular schwarz/baseline entry points
by swapping the kernel function the drivers resolve at call time, so the
numbers include exactly the work a real estimate pays per sweep.  Final
objectives are cross-checked between backends before any time is reported.

Usage:
    python benchmarks/bench_kernels.py [--levels 4,5,6] [--sweeps 5]
                                       [--repeats 3] [--gs-iterations 20]
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from lapbound import _kernels_py, backend
from lapbound.baseline import gauss_seidel, random_initial_guess
from lapbound.cycles import face_cycle_basis, vertex_subspaces
from lapbound.graph import gradient
from lapbound.ingest import sample_and_rhs, uniform_grid
from lapbound.schwarz import build_local_systems, init_state, schwarz_sweep
from lapbound.tree import compute_tau_f


def best_time(fn, repeats):
    best, result = np.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def schwarz_impls():
    impls = [("pure-python", _kernels_py.schwarz_sweep_kernel)]
    if backend.HAVE_COMPILED:
        from lapbound import _kernels

        impls.insert(0, ("compiled", _kernels.schwarz_sweep_kernel))
    return impls


def gs_impls():
    impls = [("pure-python", _kernels_py.gauss_seidel_kernel)]
    if backend.HAVE_COMPILED:
        from lapbound import _kernels

        impls.insert(0, ("compiled", _kernels.gauss_seidel_kernel))
    return impls


def bench_schwarz(levels, sweeps, repeats):
    print(f"\nschwarz sweep kernel ({sweeps} sweeps, best of {repeats})")
    print(f"{'level':>5} {'edges':>8} {'blocks':>7}", end="")
    names = [name for name, _ in schwarz_impls()]
    for name in names:
        print(f" {name:>12}", end="")
    if len(names) == 2:
        print(f" {'speedup':>8}", end="")
    print()

    saved = backend.schwarz_sweep_kernel
    try:
        for level in levels:
            grid = uniform_grid(level)
            g = grid.graph
            _, f = sample_and_rhs(grid)
            v = np.zeros(g.n)
            tau_f, _ = compute_tau_f(g, f)
            r0 = g.weights * gradient(g, v) - tau_f
            basis = face_cycle_basis(grid)
            systems = build_local_systems(g, basis, vertex_subspaces(basis))
            order = np.arange(systems.count, dtype=np.int64)

            times, objectives = [], []
            for _, impl in schwarz_impls():
                backend.schwarz_sweep_kernel = impl

                def run():
                    state = init_state(g, systems, r0)
                    for _ in range(sweeps):
                        schwarz_sweep(g, systems, state, order)
                    return state.objective

                t, obj = best_time(run, repeats)
                times.append(t)
                objectives.append(obj)
            if len(objectives) == 2 and not np.isclose(
                objectives[0], objectives[1], rtol=1e-9
            ):
                raise SystemExit(
                    f"backend mismatch at level {level}: {objectives}"
                )

            print(f"{level:>5} {g.m:>8} {systems.count:>7}", end="")
            for t in times:
                print(f" {t:>11.4f}s", end="")
            if len(times) == 2:
                print(f" {times[1] / times[0]:>7.1f}x", end="")
            print()
    finally:
        backend.schwarz_sweep_kernel = saved


def bench_gauss_seidel(levels, iterations, repeats):
    print(f"\ngauss-seidel kernel ({iterations} iterations, best of {repeats})")
    print(f"{'level':>5} {'n':>8}", end="")
    names = [name for name, _ in gs_impls()]
    for name in names:
        print(f" {name:>12}", end="")
    if len(names) == 2:
        print(f" {'speedup':>8}", end="")
    print()

    saved = backend.gauss_seidel_kernel
    try:
        for level in levels:
            grid = uniform_grid(level)
            g = grid.graph
            _, f = sample_and_rhs(grid)
            v0 = random_initial_guess(g, seed=0)

            times, results = [], []
            for _, impl in gs_impls():
                backend.gauss_seidel_kernel = impl
                t, out = best_time(
                    lambda: gauss_seidel(g, f, v0, iterations), repeats
                )
                times.append(t)
                results.append(out)
            if len(results) == 2 and not np.allclose(
                results[0], results[1], rtol=1e-9, atol=1e-12
            ):
                raise SystemExit(f"backend mismatch at level {level}")

            print(f"{level:>5} {g.n:>8}", end="")
            for t in times:
                print(f" {t:>11.4f}s", end="")
            if len(times) == 2:
                print(f" {times[1] / times[0]:>7.1f}x", end="")
            print()
    finally:
        backend.gauss_seidel_kernel = saved


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", default="4,5,6")
    parser.add_argument("--sweeps", type=int, default=5)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--gs-iterations", type=int, default=20)
    args = parser.parse_args(argv)
    levels = [int(s) for s in args.levels.split(",")]

    print(f"compiled extension available: {backend.HAVE_COMPILED}")
    print(f"default backend: {backend.backend_name()}")
    if not backend.HAVE_COMPILED:
        print("only the fallback will be timed; build the extension to compare")

    bench_schwarz(levels, args.sweeps, args.repeats)
    bench_gauss_seidel(levels, args.gs_iterations, args.repeats)
    return 0


if __name__ == "__main__":
    sys.exit(main())
