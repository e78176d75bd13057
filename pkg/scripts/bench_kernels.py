#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure-Python fallbacks.

Times the two hot paths — the Lorenz RK4 trajectory loop and the fused
policy-update step — in both lanes and prints the speedups. Both lanes are
importable side by side, so no environment juggling is needed.

Usage: python scripts/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from pbopt.kernels import pyfallback
from pbopt.nets import init_network, mlp_spec

try:
    from pbopt.kernels import _native
except ImportError:
    _native = None


def time_lorenz(impl, repeats):
    n_warm, n_ctrl = 500, 2500
    out = [np.empty(n_warm + n_ctrl + 1) for _ in range(5)]
    args = (10.0, 10.0, 10.0, 10.0, 28.0, 8.0 / 3.0, 0.01, n_warm, n_ctrl,
            True, 0.3, -0.2, 0.1, 0.05, 15.0, 20.0, 40.0)
    impl(*args, *out)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        impl(*args, *out)
    return (time.perf_counter() - start) / repeats


def time_update(kernel_cls, repeats, d=2, batch=16):
    n_angles = d * (d - 1) // 2
    specs = mlp_spec(2, (2, 2, 2), d, "tanh")
    net = init_network(specs, 0)
    sizes = np.array([2] + [s.output_size for s in specs], dtype=np.int64)
    kernel = kernel_cls(0, net.params, sizes, 0, np.array([1.0, 1.0]),
                        d, n_angles, 5e-3, 0.9, 0.999, 1e-8, 1e-6, 1e-7)
    rng = np.random.default_rng(0)
    kernel.set_frozen(None, rng.uniform(0.2, 0.8, d),
                      rng.uniform(0.5, np.pi - 0.5, n_angles))
    actions = np.ascontiguousarray(rng.normal(0, 0.4, (batch, d)))
    weights = rng.uniform(0, 1.5, batch)
    kernel.update(actions, weights, weights, weights, False)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        kernel.update(actions, weights, weights, weights, False)
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    rows = []
    py = time_lorenz(pyfallback.lorenz_rk4, max(3, args.repeats // 20))
    if _native is not None:
        native = time_lorenz(_native.lorenz_rk4, args.repeats)
        rows.append(("lorenz_rk4 (3001 steps)", py, native))
    else:
        rows.append(("lorenz_rk4 (3001 steps)", py, None))

    py = time_update(pyfallback.PolicyUpdateKernel, args.repeats)
    if _native is not None:
        native = time_update(_native.PolicyUpdateKernel, args.repeats * 10)
        rows.append(("policy update (d=2, batch 16)", py, native))
    else:
        rows.append(("policy update (d=2, batch 16)", py, None))

    print(f"{'kernel':<32}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, py, native in rows:
        if native is None:
            print(f"{name:<32}{py * 1e6:>10.1f}us{'n/a':>12}{'n/a':>10}")
        else:
            print(f"{name:<32}{py * 1e6:>10.1f}us{native * 1e6:>10.1f}us"
                  f"{py / native:>9.1f}x")
    if _native is None:
        print("\ncompiled extension not built; only the fallback lane timed")


if __name__ == "__main__":
    main()
