"""Single-hidden-layer tanh network trained with Levenberg-Marquardt.

The network is y = w2 . tanh(W1 x + b1) + b2. Each epoch builds the analytic
Jacobian of the predictions, solves the damped normal equations
(J'J + lambda*I) delta = J'r, and accepts the step only if the fit-set SSE
strictly decreases; lambda shrinks on acceptance and grows on rejection.
Early stopping watches validation MSE and restores the best weights after
``max_validation_failures`` consecutive non-improvements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import JacobianNonFinite


@dataclass(frozen=True)
class NeuralConfig:
    hidden_units: int = 20
    max_epochs: int = 200
    lambda0: float = 1e-3
    lambda_decrease: float = 0.1
    lambda_increase: float = 10.0
    max_validation_failures: int = 6

    def __post_init__(self):
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be at least 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if not 0.0 < self.lambda_decrease < 1.0 < self.lambda_increase:
            raise ValueError("need lambda_decrease < 1 < lambda_increase")


@dataclass
class MlpParams:
    w1: np.ndarray  # (h, d)
    b1: np.ndarray  # (h,)
    w2: np.ndarray  # (h,)
    b2: float

    @property
    def n_weights(self) -> int:
        return self.w1.size + self.b1.size + self.w2.size + 1


@dataclass
class TrainingTrace:
    """Diagnostics from one LM run."""

    accepted_sse: list[float] = field(default_factory=list)  # after each accepted step
    val_mse: list[float] = field(default_factory=list)  # after each accepted step
    epochs: int = 0
    stopped: str = "max_epochs"


def init_mlp(d: int, h: int, rng: np.random.Generator) -> MlpParams:
    """Uniform init in +-1/sqrt(fan_in) per layer."""
    bound1 = 1.0 / np.sqrt(d)
    bound2 = 1.0 / np.sqrt(h)
    return MlpParams(
        w1=rng.uniform(-bound1, bound1, size=(h, d)),
        b1=rng.uniform(-bound1, bound1, size=h),
        w2=rng.uniform(-bound2, bound2, size=h),
        b2=float(rng.uniform(-bound2, bound2)),
    )


def forward_mlp(params: MlpParams, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predictions and hidden activations (needed by the Jacobian)."""
    H = np.tanh(Z @ params.w1.T + params.b1)
    return H @ params.w2 + params.b2, H


def predict_mlp(params: MlpParams, Z: np.ndarray) -> np.ndarray:
    return forward_mlp(params, Z)[0]


def pack_weights(params: MlpParams) -> np.ndarray:
    return np.concatenate([params.w1.ravel(), params.b1, params.w2, [params.b2]])


def unpack_weights(w: np.ndarray, d: int, h: int) -> MlpParams:
    i = h * d
    return MlpParams(
        w1=w[:i].reshape(h, d).copy(),
        b1=w[i : i + h].copy(),
        w2=w[i + h : i + 2 * h].copy(),
        b2=float(w[-1]),
    )


def jacobian_mlp(params: MlpParams, Z: np.ndarray, H: np.ndarray) -> np.ndarray:
    """d(prediction)/d(weights), rows = samples, columns in pack order."""
    n, d = Z.shape
    h = H.shape[1]
    D = (1.0 - H * H) * params.w2  # (n, h): dyhat/da_j
    J = np.empty((n, h * d + 2 * h + 1), dtype=np.float64)
    np.multiply(D[:, :, None], Z[:, None, :], out=J[:, : h * d].reshape(n, h, d))
    J[:, h * d : h * d + h] = D
    J[:, h * d + h : h * d + 2 * h] = H
    J[:, -1] = 1.0
    return J


def fit_neural(
    Z: np.ndarray,
    zy: np.ndarray,
    Zval: np.ndarray | None,
    zyval: np.ndarray | None,
    cfg: NeuralConfig | None = None,
    seed: int = 0,
) -> tuple[MlpParams, TrainingTrace]:
    """LM training on standardized data. Returns (best params, trace)."""
    cfg = cfg or NeuralConfig()
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    zy = np.ascontiguousarray(zy, dtype=np.float64)
    n, d = Z.shape
    h = cfg.hidden_units
    has_val = Zval is not None and zyval is not None and len(zyval) > 0

    rng = np.random.default_rng(seed)
    params = init_mlp(d, h, rng)
    yhat, H = forward_mlp(params, Z)
    r = zy - yhat
    sse = float(r @ r)
    lam = cfg.lambda0
    eye = np.eye(params.n_weights)

    def val_mse_of(p: MlpParams) -> float:
        res = zyval - predict_mlp(p, Zval)
        return float(np.mean(res * res))

    best_w = pack_weights(params)
    best_val = val_mse_of(params) if has_val else np.inf
    failures = 0
    trace = TrainingTrace()
    JtJ = None
    Jtr = None

    for epoch in range(cfg.max_epochs):
        trace.epochs = epoch + 1
        if JtJ is None:  # weights moved (or first epoch): rebuild the Jacobian
            J = jacobian_mlp(params, Z, H)
            if not np.isfinite(J).all():
                raise JacobianNonFinite(
                    f"non-finite Jacobian entries at epoch {epoch} (lambda={lam:g})"
                )
            JtJ = J.T @ J
            Jtr = J.T @ r

        try:
            cf = scipy.linalg.cho_factor(JtJ + lam * eye, lower=True, check_finite=False)
            delta = scipy.linalg.cho_solve(cf, Jtr, check_finite=False)
        except scipy.linalg.LinAlgError:
            lam = min(lam * cfg.lambda_increase, 1e12)  # treat as a rejected step
            continue

        candidate = unpack_weights(pack_weights(params) + delta, d, h)
        yhat_new, H_new = forward_mlp(candidate, Z)
        r_new = zy - yhat_new
        sse_new = float(r_new @ r_new)

        if sse_new < sse:  # accepted step
            params, yhat, H, r, sse = candidate, yhat_new, H_new, r_new, sse_new
            lam = max(lam * cfg.lambda_decrease, 1e-12)
            JtJ = Jtr = None
            trace.accepted_sse.append(sse)
            if has_val:
                vm = val_mse_of(params)
                trace.val_mse.append(vm)
                if vm < best_val:
                    best_val = vm
                    best_w = pack_weights(params)
                    failures = 0
                else:
                    failures += 1
                    if failures >= cfg.max_validation_failures:
                        trace.stopped = "validation"
                        break
        else:
            lam = min(lam * cfg.lambda_increase, 1e12)

    if has_val:
        params = unpack_weights(best_w, d, h)
    return params, trace


def mlp_to_dict(params: MlpParams) -> dict:
    return {
        "w1": params.w1.tolist(),
        "b1": params.b1.tolist(),
        "w2": params.w2.tolist(),
        "b2": params.b2,
    }


def mlp_from_dict(d: dict) -> MlpParams:
    return MlpParams(
        w1=np.asarray(d["w1"], dtype=np.float64),
        b1=np.asarray(d["b1"], dtype=np.float64),
        w2=np.asarray(d["w2"], dtype=np.float64),
        b2=float(d["b2"]),
    )
