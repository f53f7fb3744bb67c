#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Representative workload: the shapes these kernels actually see, small
alphabet tables called hundreds of thousands of times by the property
suites and the Monte Carlo lab. Run:

    python3 benchmarks/bench_backends.py [--repeat 20000] [--card 8]

Requires the numba backend (do not set INFOLOSS_NUMBA=0 for this script).
Both paths are asserted to agree to 1e-12 before timing.
"""

import argparse
import time

import numpy as np

from infoloss import kernels
from infoloss.backend import NUMBA_ENABLED


def make_inputs(card, rng):
    px = rng.dirichlet(np.ones(card))
    pyx = rng.dirichlet(np.ones(card), size=card)
    qyx = rng.dirichlet(np.ones(card), size=card)
    pzx = rng.dirichlet(np.ones(card), size=card)
    joint = px[:, None] * pyx
    return {
        "entropy_bits": (px,),
        "kl_nats": (pyx[0], qyx[0]),
        "joint_mi_bits": (joint,),
        "cond_tv": (px, pyx, qyx),
        "cond_ce_nats": (px, pyx, qyx),
        "model_mis": (px, pyx, pzx),
    }


def time_impl(func, args, repeat):
    t0 = time.perf_counter()
    for _ in range(repeat):
        func(*args)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=20000)
    parser.add_argument("--card", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not NUMBA_ENABLED:
        raise SystemExit("numba backend is disabled; unset INFOLOSS_NUMBA to benchmark")

    rng = np.random.default_rng(args.seed)
    inputs = make_inputs(args.card, rng)

    # compile outside the timed region and check agreement
    for name, call_args in inputs.items():
        fast = kernels.NUMBA_IMPLS[name](*call_args)
        slow = kernels.NUMPY_IMPLS[name](*call_args)
        np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-13)

    print(f"alphabet card={args.card}, repeat={args.repeat}")
    print(f"{'kernel':<16s} {'numba':>12s} {'numpy':>12s} {'speedup':>9s}")
    for name, call_args in inputs.items():
        t_numba = time_impl(kernels.NUMBA_IMPLS[name], call_args, args.repeat)
        t_numpy = time_impl(kernels.NUMPY_IMPLS[name], call_args, args.repeat)
        per_numba = t_numba / args.repeat * 1e6
        per_numpy = t_numpy / args.repeat * 1e6
        print(f"{name:<16s} {per_numba:>10.2f}us {per_numpy:>10.2f}us "
              f"{per_numpy / per_numba:>8.1f}x")


if __name__ == "__main__":
    main()
