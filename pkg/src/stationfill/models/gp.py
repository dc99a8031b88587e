"""Exact Gaussian-process regression with a squared-exponential kernel.

k(a, b) = signal_var * exp(-||a - b||^2 / (2 * length_scale^2))

The posterior mean is computed exactly via a Cholesky factor of K + noise*I.
Exactness caps the training size: above ``max_exact_rows`` a seeded uniform
subsample is used. On standardized targets the prior mean is zero, so
predictions revert to zero far from the training set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from ..errors import CholeskyFailure

_JITTER = 1e-8
_MAX_JITTER_TRIES = 3


@dataclass(frozen=True)
class GpConfig:
    signal_var: float = 1.0
    # On 39 standardized feature dimensions, typical squared row distances sit
    # near 2*39, so the length scale defaults to ~sqrt(39) to keep the kernel
    # informative instead of effectively diagonal.
    length_scale: float = 6.0
    noise_var: float = 0.1
    max_exact_rows: int = 2000

    def __post_init__(self):
        if self.signal_var <= 0 or self.length_scale <= 0 or self.noise_var < 0:
            raise ValueError("signal_var/length_scale must be > 0 and noise_var >= 0")
        if self.max_exact_rows < 1:
            raise ValueError("max_exact_rows must be at least 1")


@dataclass
class GpParams:
    x_train: np.ndarray  # (m, d) standardized rows actually used
    alpha: np.ndarray  # (m,) = (K + noise*I)^-1 zy
    signal_var: float
    length_scale: float
    noise_var: float
    jitter: float  # extra diagonal mass needed to factor K


def kernel_matrix(A: np.ndarray, B: np.ndarray, signal_var: float, length_scale: float) -> np.ndarray:
    sq = cdist(A, B, metric="sqeuclidean")
    return signal_var * np.exp(sq / (-2.0 * length_scale * length_scale))


def fit_gp(Z: np.ndarray, zy: np.ndarray, cfg: GpConfig | None = None, seed: int = 0) -> GpParams:
    cfg = cfg or GpConfig()
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    zy = np.ascontiguousarray(zy, dtype=np.float64)
    n = zy.size
    if n > cfg.max_exact_rows:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(n, size=cfg.max_exact_rows, replace=False))
        Z, zy = Z[keep], zy[keep]

    K = kernel_matrix(Z, Z, cfg.signal_var, cfg.length_scale)
    diag = np.arange(Z.shape[0])
    jitter = 0.0
    for attempt in range(_MAX_JITTER_TRIES + 1):
        Kn = K.copy()
        Kn[diag, diag] += cfg.noise_var + jitter
        try:
            cf = scipy.linalg.cho_factor(Kn, lower=True, check_finite=False)
            break
        except scipy.linalg.LinAlgError:
            if attempt == _MAX_JITTER_TRIES:
                raise CholeskyFailure(
                    f"kernel matrix not positive definite after {_MAX_JITTER_TRIES} "
                    f"jitter additions of {_JITTER:g}"
                ) from None
            jitter += _JITTER

    alpha = scipy.linalg.cho_solve(cf, zy, check_finite=False)
    return GpParams(
        x_train=Z,
        alpha=alpha,
        signal_var=cfg.signal_var,
        length_scale=cfg.length_scale,
        noise_var=cfg.noise_var,
        jitter=jitter,
    )


def predict_gp(params: GpParams, Z: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Posterior mean at the query rows, in training-set (standardized) units."""
    Z = np.asarray(Z, dtype=np.float64)
    out = np.empty(Z.shape[0], dtype=np.float64)
    for lo in range(0, Z.shape[0], chunk):
        block = Z[lo : lo + chunk]
        Ks = kernel_matrix(block, params.x_train, params.signal_var, params.length_scale)
        out[lo : lo + chunk] = Ks @ params.alpha
    return out


def gp_to_dict(params: GpParams) -> dict:
    return {
        "x_train": params.x_train.tolist(),
        "alpha": params.alpha.tolist(),
        "signal_var": params.signal_var,
        "length_scale": params.length_scale,
        "noise_var": params.noise_var,
        "jitter": params.jitter,
    }


def gp_from_dict(d: dict) -> GpParams:
    return GpParams(
        x_train=np.asarray(d["x_train"], dtype=np.float64),
        alpha=np.asarray(d["alpha"], dtype=np.float64),
        signal_var=float(d["signal_var"]),
        length_scale=float(d["length_scale"]),
        noise_var=float(d["noise_var"]),
        jitter=float(d["jitter"]),
    )
