"""Timing comparison of the compiled and pure-numpy kernel backends.

Runs the three hot kernels (full-information loop, projected-gradient loop,
gap-stopped inner solver) on identical inputs through both backend modules
and prints a table with per-kernel medians and the compiled speedup.

Usage: python benchmarks/bench_backends.py [--T 20000] [--dim 20] [--reps 5]
"""

import argparse
import statistics
import time

import numpy as np

from pfol import _backend, _kernels_py
from pfol.geometry import ball, l1_ball
from pfol.losses import AdversarySpec, generate_sequence
from pfol.objective import fresh
from pfol.ofw_full import gap_schedule
from pfol.rng import Rng

try:
    from pfol import _kernels
except ImportError:
    _kernels = None


def time_call(fn, args, reps):
    out = None
    samples = []
    for _ in range(reps):
        start = time.perf_counter()
        out = fn(*args)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), out


def build_inputs(T, n):
    set_ = ball(n)
    rng = Rng(7).substream(f"T={T}").substream("adversary/0")
    seq = generate_sequence(AdversarySpec(kind="drifting-center", alpha=1.0), T, n, set_, rng)
    kind, param = _backend.set_code(set_)
    x1 = np.zeros(n)
    _, T0 = gap_schedule(seq.bounds.G, set_.outer_radius, 1.0)

    # solver workload on the l1 ball, where face optima force many short
    # steps before the gap certificate drops below the threshold
    l1 = l1_ball(n)
    l1_kind, l1_param = _backend.set_code(l1)
    obj = fresh(1.0, T0, x1)
    solve_rng = Rng(8)
    for _ in range(200):
        obj = obj.accumulate(solve_rng.gaussians(n), l1.project(solve_rng.ball(n)), 1.0)
    z0 = l1.project(solve_rng.ball(n))
    return {
        "ofw_full_run": (seq.thetas, seq.linears, 1.0, T0, x1, kind, param),
        "ogd_run": (seq.thetas, seq.linears, 1.0, x1, kind, param),
        "fw_solve": (obj.S, obj.A, obj.W, obj.alpha, l1_kind, l1_param, 1e-4, z0, 10**6),
    }


def same_result(a, b):
    if isinstance(a, tuple):
        return all(same_result(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.allclose(a, b, rtol=1e-9, atol=1e-12)
    return np.isclose(a, b, rtol=1e-9, atol=1e-12) if isinstance(a, float) else a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, default=20000, help="rounds for the online loops")
    ap.add_argument("--dim", type=int, default=20, help="ambient dimension")
    ap.add_argument("--reps", type=int, default=5, help="repetitions; median is reported")
    args = ap.parse_args()

    inputs = build_inputs(args.T, args.dim)
    print(f"T={args.T} dim={args.dim} reps={args.reps} "
          f"(compiled extension {'present' if _kernels else 'MISSING'})")
    print(f"{'kernel':<14} {'python ms':>10} {'c ms':>10} {'speedup':>8}  match")
    for name, call_args in inputs.items():
        py_ms, py_out = time_call(getattr(_kernels_py, name), call_args, args.reps)
        if _kernels is None:
            print(f"{name:<14} {py_ms * 1e3:>10.2f} {'-':>10} {'-':>8}")
            continue
        c_ms, c_out = time_call(getattr(_kernels, name), call_args, args.reps)
        agree = same_result(py_out, c_out)
        print(f"{name:<14} {py_ms * 1e3:>10.2f} {c_ms * 1e3:>10.2f} "
              f"{py_ms / c_ms:>7.1f}x  {agree}")


if __name__ == "__main__":
    main()
