#!/usr/bin/env python3
"""Time the compiled hot kernels against the pure-numpy fallback.

Both implementations are imported directly (ignoring the STATIONFILL_PURE
switch) and fed identical inputs shaped exactly like the production callers
build them: presorted per-feature value/target rows for the split search, and
bias-augmented rows with cached squared norms for the SVR sweep.

Usage::

    python3 benchmarks/bench_kernels.py [--rows 1000 10000] [--features 39]
                                        [--repeats 5] [--svr-sweeps 10]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from stationfill import _pykernels

try:
    from stationfill import _ckernels
except ImportError:  # extension not built; report fallback-only numbers
    _ckernels = None


def presorted_node(rng: np.random.Generator, n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """(xs, ys) for best_split: per-feature sorted values and centered targets."""
    Z = rng.normal(size=(n, d))
    y = rng.normal(size=n)
    order = np.argsort(Z, axis=0, kind="stable")
    xs = np.ascontiguousarray(np.take_along_axis(Z, order, axis=0).T)
    ys = np.ascontiguousarray((y - y.mean())[order].T)
    return xs, ys


def svr_problem(
    rng: np.random.Generator, n: int, d: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(Xb, y, qii, order) for svr_pass on a noisy linear problem."""
    Z = rng.normal(size=(n, d))
    y = Z @ rng.normal(size=d) + 0.1 * rng.normal(size=n)
    Xb = np.ascontiguousarray(np.hstack([Z, np.ones((n, 1))]))
    qii = np.einsum("ij,ij->i", Xb, Xb)
    order = rng.permutation(n).astype(np.int64)
    return Xb, y, qii, order


def best_of(repeats: int, fn) -> float:
    """Best wall time of `repeats` calls, in milliseconds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3


def bench_best_split(module, xs: np.ndarray, ys: np.ndarray, repeats: int) -> float:
    return best_of(repeats, lambda: module.best_split(xs, ys, 5))


def bench_svr_pass(module, problem, sweeps: int, repeats: int) -> float:
    Xb, y, qii, order = problem

    def run() -> None:
        # Fresh state per measurement: the sweep updates beta/w in place.
        beta = np.zeros(Xb.shape[0])
        w = np.zeros(Xb.shape[1])
        for _ in range(sweeps):
            module.svr_pass(Xb, y, beta, w, qii, 1.0, 0.1, order)

    return best_of(repeats, run)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, nargs="+", default=[1_000, 10_000],
                        help="node/problem sizes to time")
    parser.add_argument("--features", type=int, default=39,
                        help="feature count (default matches the design matrix)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="measurements per cell; the best is reported")
    parser.add_argument("--svr-sweeps", type=int, default=10,
                        help="coordinate-descent sweeps per SVR measurement")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled extension not importable — timing the numpy fallback only\n")

    rng = np.random.default_rng(args.seed)
    header = f"{'kernel':<12} {'rows':>7} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in args.rows:
        xs, ys = presorted_node(rng, n, args.features)
        py = bench_best_split(_pykernels, xs, ys, args.repeats)
        if _ckernels is not None:
            cy = bench_best_split(_ckernels, xs, ys, args.repeats)
            print(f"{'best_split':<12} {n:>7} {py:>10.3f} {cy:>12.3f} {py / cy:>7.1f}x")
        else:
            print(f"{'best_split':<12} {n:>7} {py:>10.3f} {'-':>12} {'-':>8}")

        problem = svr_problem(rng, n, args.features)
        py = bench_svr_pass(_pykernels, problem, args.svr_sweeps, args.repeats)
        if _ckernels is not None:
            cy = bench_svr_pass(_ckernels, problem, args.svr_sweeps, args.repeats)
            print(f"{'svr_pass':<12} {n:>7} {py:>10.3f} {cy:>12.3f} {py / cy:>7.1f}x")
        else:
            print(f"{'svr_pass':<12} {n:>7} {py:>10.3f} {'-':>12} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
