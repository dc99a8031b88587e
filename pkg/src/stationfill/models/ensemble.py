"""Bagged ensemble of regression trees: seeded bootstrap, mean prediction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import TreeParams, grow_tree, predict_tree, tree_from_dict, tree_to_dict


@dataclass(frozen=True)
class EnsembleConfig:
    n_trees: int = 30
    bootstrap_fraction: float = 1.0  # resample size as a fraction of the fit set
    min_leaf: int = 5
    #: False trains every tree on the identical full fit set (degenerate mode,
    #: in which a 1-tree ensemble must equal a plain tree).
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if not 0.0 < self.bootstrap_fraction <= 1.0:
            raise ValueError("bootstrap_fraction must be in (0, 1]")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")


@dataclass(frozen=True)
class ForestParams:
    trees: tuple[TreeParams, ...]


def fit_forest(
    Z: np.ndarray, zy: np.ndarray, cfg: EnsembleConfig | None = None, seed: int = 0
) -> ForestParams:
    cfg = cfg or EnsembleConfig()
    n = zy.size
    rng = np.random.default_rng(seed)
    m = max(1, int(round(cfg.bootstrap_fraction * n)))
    trees = []
    for _ in range(cfg.n_trees):
        if cfg.bootstrap:
            idx = rng.integers(0, n, size=m)  # with replacement
            trees.append(grow_tree(Z[idx], zy[idx], cfg.min_leaf))
        else:
            trees.append(grow_tree(Z, zy, cfg.min_leaf))
    return ForestParams(trees=tuple(trees))


def predict_forest(params: ForestParams, Z: np.ndarray) -> np.ndarray:
    acc = np.zeros(np.asarray(Z).shape[0], dtype=np.float64)
    for tree in params.trees:
        acc += predict_tree(tree, Z)
    return acc / len(params.trees)


def forest_to_dict(params: ForestParams) -> dict:
    return {"trees": [tree_to_dict(t) for t in params.trees]}


def forest_from_dict(d: dict) -> ForestParams:
    return ForestParams(trees=tuple(tree_from_dict(t) for t in d["trees"]))
