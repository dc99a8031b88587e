"""Compiled-vs-pure kernel equivalence and backend selection tests."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from stationfill import _pykernels
from stationfill import kernels

try:
    from stationfill import _ckernels
except ImportError:  # pragma: no cover - exercised only in pure installs
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled extension not built"
)


def presorted(rng, n, d):
    """(xs, ys) in the layout best_split expects: per-feature sorted rows."""
    Z = rng.normal(size=(n, d))
    y = rng.normal(size=n)
    y = y - y.mean()
    order = np.argsort(Z, axis=0, kind="stable")
    xs = np.ascontiguousarray(np.take_along_axis(Z, order, axis=0).T)
    ys = np.ascontiguousarray(y[order].T)
    return xs, ys


class TestBestSplitParity:
    @needs_compiled
    def test_bit_identical_across_backends(self):
        rng = np.random.default_rng(17)
        for case in range(200):
            n = int(rng.integers(2, 40))
            d = int(rng.integers(1, 5))
            xs, ys = presorted(rng, n, d)
            if case % 3 == 0:
                xs = np.round(xs, 1)  # duplicate values exercise validity masks
                xs.sort(axis=1)
            min_leaf = int(rng.choice([1, 2, 3]))
            fc, tc, sc = _ckernels.best_split(xs, ys, min_leaf)
            fp, tp, sp = _pykernels.best_split(xs, ys, min_leaf)
            assert fc == fp
            if fc >= 0:
                assert tc == tp and sc == sp
            else:
                assert np.isnan(tc) and np.isnan(tp)

    def test_no_valid_split_returns_minus_one(self):
        xs = np.array([[1.0, 1.0, 1.0]])  # constant feature: no boundary moves
        ys = np.array([[-1.0, 0.0, 1.0]])
        f, thr, score = kernels.best_split(xs, ys, 1)
        assert f == -1 and np.isnan(thr) and score == -np.inf

    def test_min_leaf_too_large_returns_minus_one(self):
        xs = np.array([[0.0, 1.0, 2.0]])
        ys = np.array([[-1.0, 0.0, 1.0]])
        f, _, _ = kernels.best_split(xs, ys, 2)
        assert f == -1


class TestSvrPassParity:
    @needs_compiled
    def test_one_pass_agrees_within_ulps(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(3, 30))
            d = int(rng.integers(1, 6))
            Xb = np.ascontiguousarray(
                np.hstack([rng.normal(size=(n, d)), np.ones((n, 1))])
            )
            y = rng.normal(size=n)
            qii = np.einsum("ij,ij->i", Xb, Xb)
            order = rng.permutation(n).astype(np.int64)

            beta_c = np.zeros(n)
            w_c = np.zeros(d + 1)
            beta_p = beta_c.copy()
            w_p = w_c.copy()
            for _sweep in range(3):
                vc = _ckernels.svr_pass(Xb, y, beta_c, w_c, qii, 1.0, 0.1, order)
                vp = _pykernels.svr_pass(Xb, y, beta_p, w_p, qii, 1.0, 0.1, order)
            # The python path uses BLAS dots, so allow last-ulp drift.
            np.testing.assert_allclose(beta_c, beta_p, rtol=0, atol=1e-12)
            np.testing.assert_allclose(w_c, w_p, rtol=0, atol=1e-12)
            assert abs(vc - vp) < 1e-12

    def test_updates_happen_in_place(self):
        rng = np.random.default_rng(29)
        Xb = np.ascontiguousarray(np.hstack([rng.normal(size=(6, 2)), np.ones((6, 1))]))
        y = rng.normal(size=6) * 3.0
        qii = np.einsum("ij,ij->i", Xb, Xb)
        beta = np.zeros(6)
        w = np.zeros(3)
        order = np.arange(6, dtype=np.int64)
        kernels.svr_pass(Xb, y, beta, w, qii, 1.0, 0.01, order)
        assert np.any(beta != 0.0)
        np.testing.assert_allclose(Xb.T @ beta, w, rtol=0, atol=1e-12)


class TestBackendSelection:
    def test_reported_backend_is_valid(self):
        assert kernels.backend() in ("compiled", "python")

    @needs_compiled
    def test_env_var_forces_python_backend(self):
        env = dict(os.environ, STATIONFILL_PURE="1")
        out = subprocess.run(
            [sys.executable, "-c", "import stationfill; print(stationfill.backend())"],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "python"

    @needs_compiled
    def test_default_prefers_compiled(self):
        env = {k: v for k, v in os.environ.items() if k != "STATIONFILL_PURE"}
        out = subprocess.run(
            [sys.executable, "-c", "import stationfill; print(stationfill.backend())"],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "compiled"
