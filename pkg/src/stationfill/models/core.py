"""Shared training interface: six regressor kinds, one train/predict contract.

Every kind trains on standardized features/targets prepared by a Scaler that
was fitted on the fit split, with the configured MaskPolicy applied to
sentinel lags. ``predict`` routes raw feature rows through the exact same
pipeline and returns physical units, so a persisted model is self-contained.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from ..errors import EmptyDataset, EmptyInput, LengthMismatch, SchemaMismatch
from ..features import N_FEATURES, Dataset, MaskPolicy, Scaler, fit_scaler
from ..timeseries import Parameter
from .ensemble import EnsembleConfig, fit_forest, forest_from_dict, forest_to_dict, predict_forest
from .gp import GpConfig, fit_gp, gp_from_dict, gp_to_dict, predict_gp
from .linreg import LinearConfig, fit_linear, linear_from_dict, linear_to_dict, predict_linear
from .neural import NeuralConfig, fit_neural, mlp_from_dict, mlp_to_dict, predict_mlp
from .svr import SvrConfig, fit_svr, predict_svr, svr_from_dict, svr_to_dict
from .tree import TreeConfig, grow_tree, predict_tree, tree_from_dict, tree_to_dict


class RegressorKind(Enum):
    LR = "LR"
    RT = "RT"
    ET = "ET"
    NN = "NN"
    GPR = "GPR"
    SVR = "SVR"


@dataclass(frozen=True)
class TrainConfig:
    """All tunables for all kinds, so one config object trains a whole suite."""

    rng_seed: int = 0
    mask_policy: MaskPolicy = MaskPolicy.ZERO_AFTER_STANDARDIZE
    linear: LinearConfig = field(default_factory=LinearConfig)
    tree: TreeConfig = field(default_factory=TreeConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    neural: NeuralConfig = field(default_factory=NeuralConfig)
    gp: GpConfig = field(default_factory=GpConfig)
    svr: SvrConfig = field(default_factory=SvrConfig)

    def to_dict(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "mask_policy": self.mask_policy.value,
            "linear": vars(self.linear).copy(),
            "tree": vars(self.tree).copy(),
            "ensemble": vars(self.ensemble).copy(),
            "neural": vars(self.neural).copy(),
            "gp": vars(self.gp).copy(),
            "svr": vars(self.svr).copy(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(
            rng_seed=int(d.get("rng_seed", 0)),
            mask_policy=MaskPolicy(d.get("mask_policy", MaskPolicy.ZERO_AFTER_STANDARDIZE.value)),
            linear=LinearConfig(**d.get("linear", {})),
            tree=TreeConfig(**d.get("tree", {})),
            ensemble=EnsembleConfig(**d.get("ensemble", {})),
            neural=NeuralConfig(**d.get("neural", {})),
            gp=GpConfig(**d.get("gp", {})),
            svr=SvrConfig(**d.get("svr", {})),
        )


def metrics(measured: np.ndarray, predicted: np.ndarray) -> tuple[float, float]:
    """(MSE, RMSE) between parallel vectors, in their physical units."""
    m = np.asarray(measured, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if m.size == 0:
        raise EmptyInput("metrics need at least one sample")
    if m.shape != p.shape:
        raise LengthMismatch(f"measured {m.shape} vs predicted {p.shape}")
    mse = float(np.mean((m - p) ** 2))
    return mse, math.sqrt(mse)


@dataclass
class TrainedModel:
    """A fitted regressor plus everything needed to reproduce its inputs."""

    kind: RegressorKind
    parameter: Parameter
    mask_policy: MaskPolicy
    station_order: tuple[str, ...]
    scaler: Scaler
    config: TrainConfig
    params: object
    train_mse: float
    train_rmse: float
    throughput_ms_per_sample: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        return predict(self, X)


# kind -> (fit adapter, predictor, params serializer, params deserializer)
_FIT: dict[RegressorKind, Callable] = {
    RegressorKind.LR: lambda Z, zy, Zv, zv, cfg: fit_linear(Z, zy, cfg.linear),
    RegressorKind.RT: lambda Z, zy, Zv, zv, cfg: grow_tree(Z, zy, cfg.tree.min_leaf),
    RegressorKind.ET: lambda Z, zy, Zv, zv, cfg: fit_forest(Z, zy, cfg.ensemble, cfg.rng_seed),
    RegressorKind.NN: lambda Z, zy, Zv, zv, cfg: fit_neural(
        Z, zy, Zv, zv, cfg.neural, cfg.rng_seed
    )[0],
    RegressorKind.GPR: lambda Z, zy, Zv, zv, cfg: fit_gp(Z, zy, cfg.gp, cfg.rng_seed),
    RegressorKind.SVR: lambda Z, zy, Zv, zv, cfg: fit_svr(Z, zy, cfg.svr, cfg.rng_seed),
}

_PREDICT: dict[RegressorKind, Callable] = {
    RegressorKind.LR: predict_linear,
    RegressorKind.RT: predict_tree,
    RegressorKind.ET: predict_forest,
    RegressorKind.NN: predict_mlp,
    RegressorKind.GPR: predict_gp,
    RegressorKind.SVR: predict_svr,
}

PARAMS_TO_DICT: dict[RegressorKind, Callable] = {
    RegressorKind.LR: linear_to_dict,
    RegressorKind.RT: tree_to_dict,
    RegressorKind.ET: forest_to_dict,
    RegressorKind.NN: mlp_to_dict,
    RegressorKind.GPR: gp_to_dict,
    RegressorKind.SVR: svr_to_dict,
}

PARAMS_FROM_DICT: dict[RegressorKind, Callable] = {
    RegressorKind.LR: linear_from_dict,
    RegressorKind.RT: tree_from_dict,
    RegressorKind.ET: forest_from_dict,
    RegressorKind.NN: mlp_from_dict,
    RegressorKind.GPR: gp_from_dict,
    RegressorKind.SVR: svr_from_dict,
}


def train(
    kind: RegressorKind,
    fit: Dataset,
    val: Dataset | None,
    cfg: TrainConfig | None = None,
) -> TrainedModel:
    """Fit one regressor kind on the fit split.

    The validation split is consumed only by kinds that use it (NN early
    stopping); it must be non-empty for NN and may be None/empty otherwise.
    Training metrics are computed on the fit split in physical units;
    throughput is wall-clock training milliseconds per fit row.
    """
    cfg = cfg or TrainConfig()
    if fit.n_rows == 0:
        raise EmptyDataset("fit split has no rows")
    has_val = val is not None and val.n_rows > 0
    if kind is RegressorKind.NN and not has_val:
        raise EmptyDataset("NN early stopping needs a non-empty validation split")

    scaler = fit_scaler(fit)
    Z = scaler.transform_features(fit.X, cfg.mask_policy)
    zy = scaler.transform_target(fit.y)
    Zv = scaler.transform_features(val.X, cfg.mask_policy) if has_val else None
    zv = scaler.transform_target(val.y) if has_val else None

    t0 = time.perf_counter()
    params = _FIT[kind](Z, zy, Zv, zv, cfg)
    elapsed = time.perf_counter() - t0

    fit_pred = scaler.inverse_target(_PREDICT[kind](params, Z))
    mse, rmse = metrics(fit.y, fit_pred)
    return TrainedModel(
        kind=kind,
        parameter=fit.parameter,
        mask_policy=cfg.mask_policy,
        station_order=fit.station_ids,
        scaler=scaler,
        config=cfg,
        params=params,
        train_mse=mse,
        train_rmse=rmse,
        throughput_ms_per_sample=elapsed * 1000.0 / fit.n_rows,
    )


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Predict physical-unit targets for raw feature rows (sentinels allowed)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != N_FEATURES:
        raise SchemaMismatch(
            f"expected (n, {N_FEATURES}) feature rows, got {X.shape}"
        )
    Z = model.scaler.transform_features(X, model.mask_policy)
    return model.scaler.inverse_target(_PREDICT[model.kind](model.params, Z))
