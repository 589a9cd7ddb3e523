"""Timing comparison of the compiled and pure-Python integration kernels.

Run as a script:

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is executed on both backends with identical inputs; reported
numbers are best-of-``repeat`` wall times.
"""
import argparse
import math
import time

import numpy as np

from curved3body import _kernels_py
from curved3body import homographic as hom
from curved3body.geometry import Curvature

try:
    from curved3body import _kernels as _compiled
except ImportError:
    _compiled = None


def _full_workload(mod):
    rs = hom.ReducedState(0.6, 0.05, 0.0, 0.8)
    st = hom.embed_lagrangian(rs, Curvature(1.0), 1.0)
    status, ts, _, _ = mod.integrate_full(
        st.to_vector(), st.masses, 1.0, 0.0, 50.0, 1e-3, 1e-10, 1e-12,
        1_000_000, 1e-8, math.inf, None)
    assert status == mod.STATUS_T_END
    return len(ts)


def _reduced_workload(mod):
    y0 = np.array([0.6, 0.05, 0.0])
    status, ts, _, _ = mod.integrate_reduced(
        mod.KIND_LAGRANGIAN, y0, 0.8, 1.0, 1.0, 0.0, 2000.0, 1e-3, 1e-10,
        1e-12, 1_000_000, 1e-6, 0.9999999, -1.0, math.inf, None)
    assert status == mod.STATUS_T_END
    return len(ts)


def _grid_workload(mod):
    # many short reduced runs, the shape of a portrait sweep
    n = 0
    for r0 in np.linspace(0.3, 0.9, 12):
        for nu0 in np.linspace(-0.3, 0.3, 8):
            y0 = np.array([r0, nu0, 0.0])
            _, ts, _, _ = mod.integrate_reduced(
                mod.KIND_EULERIAN, y0, 2.0, 1.0, 2.0, 0.0, 30.0, 1e-3,
                1e-10, 1e-12, 1_000_000, 1e-6, 0.9999999, -1.0, math.inf,
                None)
            n += len(ts)
    return n


WORKLOADS = [
    ("full system, t=50", _full_workload),
    ("reduced system, t=2000", _reduced_workload),
    ("sweep-shaped 96 cells", _grid_workload),
]


def best_time(fn, mod, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(mod)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _compiled is None:
        print("compiled backend not available; timing the fallback only")
    backends = [("python", _kernels_py)]
    if _compiled is not None:
        backends.append(("compiled", _compiled))

    print(f"{'workload':<26} " + " ".join(f"{name:>12}" for name, _ in backends)
          + ("      speedup" if _compiled is not None else ""))
    for label, fn in WORKLOADS:
        times = [best_time(fn, mod, args.repeat) for _, mod in backends]
        row = f"{label:<26} " + " ".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
