"""Linear epsilon-insensitive SVR solved by dual coordinate descent.

Bias handling follows the augmented-feature formulation: every row gets a
constant 1 column and the bias is regularized with the weights, which removes
the equality constraint from the dual. One dual coefficient beta_i in [-C, C]
per sample; the primal weights w = X'beta are maintained incrementally. The
per-sample sweep is the hot loop and lives in ``stationfill.kernels``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import NonConvergenceWarning


@dataclass(frozen=True)
class SvrConfig:
    epsilon: float = 0.1
    C: float = 1.0
    max_passes: int = 1000
    tol: float = 1e-3

    def __post_init__(self):
        if self.epsilon < 0 or self.C <= 0 or self.tol <= 0 or self.max_passes < 1:
            raise ValueError("need epsilon >= 0, C > 0, tol > 0, max_passes >= 1")


@dataclass
class SvrParams:
    w: np.ndarray  # (d+1,), last entry is the bias weight
    beta: np.ndarray  # (n,) dual coefficients
    epsilon: float
    C: float
    passes: int
    converged: bool
    final_violation: float

    @property
    def n_support(self) -> int:
        return int(np.count_nonzero(self.beta))


def _augment(Z: np.ndarray) -> np.ndarray:
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    return np.ascontiguousarray(np.hstack([Z, np.ones((Z.shape[0], 1))]))


def fit_svr(Z: np.ndarray, zy: np.ndarray, cfg: SvrConfig | None = None, seed: int = 0) -> SvrParams:
    cfg = cfg or SvrConfig()
    zy = np.ascontiguousarray(zy, dtype=np.float64)
    Xb = _augment(Z)
    n = Xb.shape[0]
    qii = np.einsum("ij,ij->i", Xb, Xb)  # >= 1 thanks to the bias column
    beta = np.zeros(n, dtype=np.float64)
    w = np.zeros(Xb.shape[1], dtype=np.float64)

    rng = np.random.default_rng(seed)
    converged = False
    violation = np.inf
    passes = 0
    for _ in range(cfg.max_passes):
        order = rng.permutation(n).astype(np.int64)
        violation = kernels.svr_pass(Xb, zy, beta, w, qii, cfg.C, cfg.epsilon, order)
        passes += 1
        if violation < cfg.tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"SVR stopped at max_passes={cfg.max_passes} with KKT violation "
            f"{violation:.3g} >= tol {cfg.tol:g}; returning the current iterate",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return SvrParams(
        w=w,
        beta=beta,
        epsilon=cfg.epsilon,
        C=cfg.C,
        passes=passes,
        converged=converged,
        final_violation=float(violation),
    )


def predict_svr(params: SvrParams, Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, dtype=np.float64)
    return Z @ params.w[:-1] + params.w[-1]


def primal_objective(Z: np.ndarray, zy: np.ndarray, params: SvrParams) -> float:
    """0.5||w||^2 + C * sum of epsilon-insensitive losses."""
    resid = np.abs(predict_svr(params, Z) - zy) - params.epsilon
    hinge = np.maximum(resid, 0.0)
    return float(0.5 * params.w @ params.w + params.C * hinge.sum())


def dual_objective(Z: np.ndarray, zy: np.ndarray, params: SvrParams) -> float:
    """Value of the (maximization-form) dual at the stored coefficients."""
    w = _augment(Z).T @ params.beta
    return float(
        -0.5 * w @ w - params.epsilon * np.abs(params.beta).sum() + zy @ params.beta
    )


def svr_to_dict(params: SvrParams) -> dict:
    return {
        "w": params.w.tolist(),
        "beta": params.beta.tolist(),
        "epsilon": params.epsilon,
        "C": params.C,
        "passes": params.passes,
        "converged": params.converged,
        "final_violation": params.final_violation,
    }


def svr_from_dict(d: dict) -> SvrParams:
    return SvrParams(
        w=np.asarray(d["w"], dtype=np.float64),
        beta=np.asarray(d["beta"], dtype=np.float64),
        epsilon=float(d["epsilon"]),
        C=float(d["C"]),
        passes=int(d["passes"]),
        converged=bool(d["converged"]),
        final_violation=float(d["final_violation"]),
    )
