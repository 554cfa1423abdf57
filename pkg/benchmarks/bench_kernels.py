#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Run from the repository root after building the extension in place:

    python benchmarks/bench_kernels.py

The diffusion substep is dominated by the cosine transforms (scipy), so the
full-step speedup is modest; the pointwise kernels themselves are where the
compiled core earns its keep.
"""

import timeit

import numpy as np

from acsplit import Field, GridSpec, ModelParams, fourth_order_v
from acsplit._kernels import _ref
from acsplit.solver import step

try:
    from acsplit._kernels import _core
except ImportError:
    _core = None


def time_call(fn, repeats=7, number=20):
    return min(timeit.repeat(fn, repeat=repeats, number=number)) / number


def bench_pointwise(shape):
    n = int(np.prod(shape))
    rng = np.random.default_rng(0)
    phi = rng.uniform(-1.0, 1.0, n)
    out = np.empty(n)
    eig = -np.sort(rng.uniform(0.0, 4e4, n))
    coeffs = rng.standard_normal(n)
    decay = float(np.exp(-0.5))

    rows = []
    impls = [("numpy", _ref)] + ([("compiled", _core)] if _core else [])
    for label, impl in impls:
        t_free = time_call(lambda: impl.free_energy_apply(phi, out, decay))
        t_heat = time_call(lambda: impl.heat_multiplier_apply(coeffs, eig, 1e-3, 1e9, out))
        t_scan = time_call(lambda: impl.guard_scan(phi))
        rows.append((label, t_free, t_heat, t_scan))
    return n, rows


def bench_full_step(cells):
    grid = GridSpec.box(1.0, cells, 3)
    rng = np.random.default_rng(1)
    f = Field(grid, 0.005 * rng.uniform(-1.0, 1.0, grid.shape))
    model = ModelParams(0.015)
    scheme = fourth_order_v()
    return time_call(lambda: step(f, scheme, 1e-5, model), number=5)


def main():
    if _core is None:
        print("compiled kernels not built; showing numpy fallback only\n")
    header = f"{'cells':>10} {'kernel':<22} {'numpy':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for shape in [(64,), (128, 128), (64, 64, 64)]:
        n, rows = bench_pointwise(shape)
        base = {label: (tf, th, ts) for label, tf, th, ts in rows}
        for idx, name in enumerate(["free_energy_apply", "heat_multiplier_apply", "guard_scan"]):
            ref_t = base["numpy"][idx]
            if "compiled" in base:
                core_t = base["compiled"][idx]
                print(f"{n:>10} {name:<22} {ref_t*1e6:>10.1f}us {core_t*1e6:>10.1f}us {ref_t/core_t:>8.2f}x")
            else:
                print(f"{n:>10} {name:<22} {ref_t*1e6:>10.1f}us {'-':>12} {'-':>9}")
    print()
    t = bench_full_step(32)
    print(f"full 6-stage step on 32^3 (scipy transforms + active backend): {t*1e3:.2f} ms")


if __name__ == "__main__":
    main()
