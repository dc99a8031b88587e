"""Model persistence: one self-describing JSON artifact per trained model.

The artifact embeds a format tag, the feature schema (count + station order),
the full training configuration, the scaler, and the fitted parameters, so a
loaded model reproduces the original predictions bit for bit. Loads verify
the tag and schema and refuse anything that does not match.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import SchemaMismatch
from ..features import N_FEATURES, MaskPolicy, Scaler
from ..timeseries import N_INPUT_STATIONS, Parameter
from .core import (
    PARAMS_FROM_DICT,
    PARAMS_TO_DICT,
    RegressorKind,
    TrainConfig,
    TrainedModel,
)

FORMAT_TAG = "stationfill-model/1"


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": model.kind.value,
        "parameter": model.parameter.value,
        "mask_policy": model.mask_policy.value,
        "station_order": list(model.station_order),
        "n_features": N_FEATURES,
        "config": model.config.to_dict(),
        "scaler": model.scaler.to_dict(),
        "train_metrics": {
            "mse": model.train_mse,
            "rmse": model.train_rmse,
            "throughput_ms_per_sample": model.throughput_ms_per_sample,
        },
        "params": PARAMS_TO_DICT[model.kind](model.params),
    }


def save_model(model: TrainedModel, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model), sort_keys=True) + "\n")


def model_from_dict(doc: dict) -> TrainedModel:
    tag = doc.get("format")
    if tag != FORMAT_TAG:
        raise SchemaMismatch(f"unsupported model format tag {tag!r}, expected {FORMAT_TAG!r}")
    if doc.get("n_features") != N_FEATURES:
        raise SchemaMismatch(
            f"model was trained on {doc.get('n_features')} features, "
            f"this build uses {N_FEATURES}"
        )
    station_order = tuple(doc.get("station_order", ()))
    if len(station_order) != N_INPUT_STATIONS:
        raise SchemaMismatch(
            f"model records {len(station_order)} input stations, expected {N_INPUT_STATIONS}"
        )
    try:
        kind = RegressorKind(doc["kind"])
        metrics_doc = doc["train_metrics"]
        model = TrainedModel(
            kind=kind,
            parameter=Parameter.from_string(doc["parameter"]),
            mask_policy=MaskPolicy(doc["mask_policy"]),
            station_order=station_order,
            scaler=Scaler.from_dict(doc["scaler"]),
            config=TrainConfig.from_dict(doc["config"]),
            params=PARAMS_FROM_DICT[kind](doc["params"]),
            train_mse=float(metrics_doc["mse"]),
            train_rmse=float(metrics_doc["rmse"]),
            throughput_ms_per_sample=float(metrics_doc["throughput_ms_per_sample"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaMismatch(f"malformed model artifact: {exc}") from exc
    if model.scaler.feature_mean.shape != (N_FEATURES,):
        raise SchemaMismatch("scaler statistics do not match the feature schema")
    return model


def load_model(path: str | Path) -> TrainedModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not a model artifact: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaMismatch(f"{path}: not a model artifact (top level is not an object)")
    return model_from_dict(doc)
