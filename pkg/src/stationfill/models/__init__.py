"""Regression model suite behind one train/predict interface."""

from .core import (
    RegressorKind,
    TrainConfig,
    TrainedModel,
    metrics,
    predict,
    train,
)
from .ensemble import EnsembleConfig, ForestParams, fit_forest, predict_forest
from .gp import GpConfig, GpParams, fit_gp, kernel_matrix, predict_gp
from .linreg import LinearConfig, LinearParams, fit_linear, predict_linear
from .neural import (
    MlpParams,
    NeuralConfig,
    TrainingTrace,
    fit_neural,
    forward_mlp,
    init_mlp,
    jacobian_mlp,
    pack_weights,
    predict_mlp,
    unpack_weights,
)
from .persist import FORMAT_TAG, load_model, model_from_dict, model_to_dict, save_model
from .svr import (
    SvrConfig,
    SvrParams,
    dual_objective,
    fit_svr,
    predict_svr,
    primal_objective,
)
from .tree import TreeConfig, TreeParams, grow_tree, predict_tree

__all__ = [
    "RegressorKind",
    "TrainConfig",
    "TrainedModel",
    "metrics",
    "predict",
    "train",
    "EnsembleConfig",
    "ForestParams",
    "fit_forest",
    "predict_forest",
    "GpConfig",
    "GpParams",
    "fit_gp",
    "kernel_matrix",
    "predict_gp",
    "LinearConfig",
    "LinearParams",
    "fit_linear",
    "predict_linear",
    "MlpParams",
    "NeuralConfig",
    "TrainingTrace",
    "fit_neural",
    "forward_mlp",
    "init_mlp",
    "jacobian_mlp",
    "pack_weights",
    "predict_mlp",
    "unpack_weights",
    "FORMAT_TAG",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "SvrConfig",
    "SvrParams",
    "dual_objective",
    "fit_svr",
    "predict_svr",
    "primal_objective",
    "TreeConfig",
    "TreeParams",
    "grow_tree",
    "predict_tree",
]
