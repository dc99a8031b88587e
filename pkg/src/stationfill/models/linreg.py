"""Multiple linear regression via least squares, with intercept."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularSystem


@dataclass(frozen=True)
class LinearConfig:
    #: L2 penalty on the non-intercept weights; 0 selects the plain
    #: least-squares (min-norm pseudo-inverse) solution.
    ridge: float = 0.0


@dataclass(frozen=True)
class LinearParams:
    weights: np.ndarray  # (d,)
    intercept: float


def fit_linear(Z: np.ndarray, zy: np.ndarray, cfg: LinearConfig | None = None) -> LinearParams:
    """Least-squares weights for zy ~ Z @ w + b.

    Exactly collinear columns are legal (standardized feature blocks contain
    constant availability columns): the default path returns the min-norm
    solution. SingularSystem is raised only if LAPACK itself fails, or if the
    ridge-regularized normal equations cannot be solved.
    """
    cfg = cfg or LinearConfig()
    n, d = Z.shape
    A = np.hstack([Z, np.ones((n, 1))])
    if cfg.ridge > 0.0:
        G = A.T @ A + cfg.ridge * np.eye(d + 1)
        G[-1, -1] -= cfg.ridge  # leave the intercept unpenalized
        try:
            w = np.linalg.solve(G, A.T @ zy)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"ridge normal equations unsolvable: {exc}") from exc
    else:
        try:
            w, *_ = np.linalg.lstsq(A, zy, rcond=None)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"least-squares solve failed: {exc}") from exc
    return LinearParams(weights=w[:-1], intercept=float(w[-1]))


def predict_linear(params: LinearParams, Z: np.ndarray) -> np.ndarray:
    return Z @ params.weights + params.intercept


def linear_to_dict(params: LinearParams) -> dict:
    return {"weights": params.weights.tolist(), "intercept": params.intercept}


def linear_from_dict(d: dict) -> LinearParams:
    return LinearParams(
        weights=np.asarray(d["weights"], dtype=np.float64),
        intercept=float(d["intercept"]),
    )
