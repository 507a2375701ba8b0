"""Benchmark the numba kernels against the pure numpy/scipy fallbacks.

Both code paths are importable side by side, so a single run compares
them directly.  Run with EITNARROW_DISABLE_NUMBA=1 to confirm the
fallback is the one the package would use without numba.

Usage:
    python benchmarks/bench_kernels.py [--lags N] [--realizations N]
        [--samples N] [--slices N] [--repeat N]
"""

import argparse
import time

import numpy as np

from eitnarrow.kernels import (
    USE_NUMBA,
    _g_sweep_numpy,
    _mc_batch_numpy,
    g_sweep,
    g_sweep_coefficients,
    mc_batch,
)


def best_of(repeat, fn, *args, **kwargs):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_g_sweep(n_lags, repeat):
    rng = np.random.default_rng(0)
    r = rng.normal(size=n_lags) + 1j * rng.normal(size=n_lags)
    decay, c_prev, c_curr = g_sweep_coefficients(2.0 + 1.0j, 0.3 - 0.1j, 1e-3)
    args = (r, 0.1 + 0.0j, decay, c_prev, c_curr)
    g_sweep(*args)  # warm up (jit compilation)
    t_active = best_of(repeat, g_sweep, *args)
    t_numpy = best_of(repeat, _g_sweep_numpy, *args)
    return t_active, t_numpy


def bench_mc_batch(n_real, n_samples, n_slices, repeat):
    rng = np.random.default_rng(1)
    probe = rng.normal(size=(n_real, n_samples)) + 1j * rng.normal(
        size=(n_real, n_samples)
    )
    drive = np.full((n_real, n_samples), 10.0 + 0.0j)
    coeffs = (
        0.93 - 0.01j, 0.965 - 0.005j, 0.07, 0.035,
        -0.02 + 0.001j, 0.95 + 0.02j, 0.01 - 0.002j, -0.001j,
        -0.3 + 0.05j, 5.0 + 1.0j,
    )
    mc_batch(probe, drive, n_slices, *coeffs)  # warm up
    t_active = best_of(repeat, mc_batch, probe, drive, n_slices, *coeffs)
    t_numpy = best_of(
        repeat, _mc_batch_numpy, probe, drive, np.empty_like(probe), n_slices, *coeffs
    )
    return t_active, t_numpy


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lags", type=int, default=200_000)
    parser.add_argument("--realizations", type=int, default=64)
    parser.add_argument("--samples", type=int, default=20_000)
    parser.add_argument("--slices", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backend = "numba" if USE_NUMBA else "numpy/scipy fallback"
    print(f"active backend: {backend}")
    print(f"{'kernel':<12} {'active [ms]':>12} {'numpy [ms]':>12} {'speedup':>9}")

    t_a, t_n = bench_g_sweep(args.lags, args.repeat)
    print(f"{'g_sweep':<12} {1e3 * t_a:>12.3f} {1e3 * t_n:>12.3f} {t_n / t_a:>8.2f}x")

    t_a, t_n = bench_mc_batch(args.realizations, args.samples, args.slices, args.repeat)
    print(f"{'mc_batch':<12} {1e3 * t_a:>12.3f} {1e3 * t_n:>12.3f} {t_n / t_a:>8.2f}x")


if __name__ == "__main__":
    main()
