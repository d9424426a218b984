"""Time the bitmask kernels with and without the compiled backend.

Run from the repository root after installing the package:

    python3 benchmarks/bench_kernels.py

Each kernel is timed on the same inputs with the plain numpy
implementation and the jit-compiled one (compilation happens in a
warm-up pass so it is not billed to the timing loop).
"""

from __future__ import annotations

import time

import numpy as np

from spinengine import kernels

def _time(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    energies = kernels.NUMPY_IMPLS["ising_energies"](20, -1.0, 2.0)
    runners = {
        "ising_energies": lambda impls: impls["ising_energies"](20, -1.0, 2.0),
        "ground_state_stats": lambda impls: impls["ground_state_stats"](20, -1.0, 2.0, 1e-9),
        "gibbs_table_stats": lambda impls: impls["gibbs_table_stats"](energies, 0.7),
    }

    have_numba = bool(kernels.NUMBA_IMPLS)
    if not have_numba:
        print("compiled backend unavailable (numba missing); "
              "timing the numpy implementations only")
    else:
        # compile outside the timing loop
        for run in runners.values():
            run(kernels.NUMBA_IMPLS)

    print(f"{'kernel':24s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}")
    for name, run in runners.items():
        t_np = _time(lambda: run(kernels.NUMPY_IMPLS)) * 1e3
        if have_numba:
            t_nb = _time(lambda: run(kernels.NUMBA_IMPLS)) * 1e3
            print(f"{name:24s} {t_np:12.3f} {t_nb:12.3f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:24s} {t_np:12.3f} {'-':>12s} {'-':>9s}")

    # cross-check: both backends must agree bit for bit on the physics
    if have_numba:
        a = kernels.NUMPY_IMPLS["ising_energies"](16, -1.0, 2.0)
        b = kernels.NUMBA_IMPLS["ising_energies"](16, -1.0, 2.0)
        print("backend agreement:", "ok" if np.array_equal(a, b) else "MISMATCH")


if __name__ == "__main__":
    main()
