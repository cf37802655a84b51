"""Timing comparison: compiled stepper vs the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_integrator.py [--repeats N]

Both backends are driven through the same interval-chaining code path by
swapping halfscat._integrator.advance_interval in place, so the numbers
differ only in the stepper kernel. Each workload row reports the best wall
time over the repeats and the relative disagreement of the resulting Jost
matrices between the backends.
"""

import argparse
import time

import numpy as np

import halfscat._integrator as _integ
from halfscat import _stepper_py
from halfscat import jost_matrix, pair_from_angles, piecewise_constant

try:
    from halfscat import _stepper
except ImportError:
    _stepper = None


def coupled_well(n, depth=4.0, width=np.pi, seed=5):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    v = (w + w.conj().T) / 2.0 - depth * np.eye(n)
    return piecewise_constant([0.0, width], [v])


def workloads():
    w1 = coupled_well(1)
    w2 = coupled_well(2)
    w4 = coupled_well(4)
    bp1 = pair_from_angles([np.pi / 4])
    bp2 = pair_from_angles([np.pi / 4, np.pi])
    bp4 = pair_from_angles([0.5, 1.1, np.pi / 2, np.pi])
    return [
        ("scalar well, k = 2", lambda: jost_matrix(w1, bp1, 2.0).J),
        ("scalar well, k = 40 (oscillatory)", lambda: jost_matrix(w1, bp1, 40.0).J),
        ("coupled n = 2, k = 1.5i (bound-state axis)",
         lambda: jost_matrix(w2, bp2, 1.5j).J),
        ("coupled n = 4, k = 5", lambda: jost_matrix(w4, bp4, 5.0).J),
    ]


def best_time(fn, repeats):
    fn()  # warm up: allocations, trig tables, branch predictors
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(repeats):
    impls = [("python", _stepper_py.advance_interval)]
    if _stepper is not None:
        impls.insert(0, ("compiled", _stepper.advance_interval))
    else:
        print("compiled stepper not importable; timing the fallback only\n")

    saved = _integ.advance_interval
    rows = []
    try:
        for name, fn in workloads():
            cells = {}
            results = {}
            for impl_name, impl in impls:
                _integ.advance_interval = impl
                cells[impl_name] = best_time(fn, repeats)
                results[impl_name] = fn()
            rows.append((name, cells, results))
    finally:
        _integ.advance_interval = saved

    width = max(len(r[0]) for r in rows)
    header = f"{'workload':<{width}}  compiled ms  python ms   speedup  rel diff"
    print(header)
    print("-" * len(header))
    for name, cells, results in rows:
        py = cells["python"] * 1e3
        if "compiled" in cells:
            co = cells["compiled"] * 1e3
            diff = np.linalg.norm(results["compiled"] - results["python"])
            diff /= max(np.linalg.norm(results["python"]), 1e-300)
            print(f"{name:<{width}}  {co:11.3f}  {py:9.3f}  {py / co:7.1f}x"
                  f"  {diff:.2e}")
        else:
            print(f"{name:<{width}}  {'-':>11}  {py:9.3f}  {'-':>8}  -")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7,
                    help="timing repeats per workload (best is reported)")
    args = ap.parse_args()
    run(max(1, args.repeats))


if __name__ == "__main__":
    main()
