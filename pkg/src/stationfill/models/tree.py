"""Greedy binary regression tree (CART) with SSE-reduction splits.

The split search is the hot loop and lives in ``stationfill.kernels``; this
module owns the growth policy: a node becomes a leaf when it is too small to
split (fewer than 2*min_leaf rows), when its targets are exactly constant, or
when no candidate split reduces the SSE. Candidate thresholds are midpoints
between consecutive distinct sorted values; ties are broken toward the lowest
feature index, then the lowest threshold, which makes the grown tree unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass(frozen=True)
class TreeConfig:
    min_leaf: int = 5

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")


@dataclass(frozen=True)
class TreeParams:
    """Flat node arrays; feature == -1 marks a leaf, children are node ids."""

    feature: np.ndarray  # (n_nodes,) int32
    threshold: np.ndarray  # (n_nodes,) float64
    left: np.ndarray  # (n_nodes,) int32
    right: np.ndarray  # (n_nodes,) int32
    value: np.ndarray  # (n_nodes,) float64, node mean
    n_samples: np.ndarray  # (n_nodes,) int32

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())


def grow_tree(Z: np.ndarray, zy: np.ndarray, min_leaf: int = 5) -> TreeParams:
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    zy = np.ascontiguousarray(zy, dtype=np.float64)
    n = zy.size
    if n == 0:
        raise ValueError("cannot grow a tree on zero rows")
    if min_leaf < 1:
        raise ValueError("min_leaf must be at least 1")

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    n_samples: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        value.append(np.nan)
        n_samples.append(0)
        return len(feature) - 1

    stack: list[tuple[int, np.ndarray]] = [(new_node(), np.arange(n))]
    while stack:
        node, rows = stack.pop()
        yn = zy[rows]
        mean = float(yn.mean())
        value[node] = mean
        n_samples[node] = rows.size

        if rows.size < 2 * min_leaf or np.all(yn == yn[0]):
            continue

        Zn = Z[rows]
        order = np.argsort(Zn, axis=0, kind="stable")
        xs = np.ascontiguousarray(np.take_along_axis(Zn, order, axis=0).T)
        ys = np.ascontiguousarray((yn - mean)[order].T)
        f, thr, score = kernels.best_split(xs, ys, min_leaf)
        if f < 0 or score <= 0.0:
            continue

        mask = Zn[:, f] <= thr
        left_rows = rows[mask]
        right_rows = rows[~mask]
        if left_rows.size == 0 or right_rows.size == 0:
            continue  # midpoint rounded onto a data value; treat as unsplittable

        feature[node] = int(f)
        threshold[node] = float(thr)
        left_id = new_node()
        right_id = new_node()
        left[node] = left_id
        right[node] = right_id
        stack.append((right_id, right_rows))
        stack.append((left_id, left_rows))

    return TreeParams(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
        n_samples=np.asarray(n_samples, dtype=np.int32),
    )


def predict_tree(params: TreeParams, Z: np.ndarray) -> np.ndarray:
    """Route every row to its leaf, one depth level per vectorized step."""
    Z = np.asarray(Z, dtype=np.float64)
    node = np.zeros(Z.shape[0], dtype=np.int32)
    while True:
        f = params.feature[node]
        active = np.flatnonzero(f >= 0)
        if active.size == 0:
            break
        cur = node[active]
        go_left = Z[active, f[active]] <= params.threshold[cur]
        node[active] = np.where(go_left, params.left[cur], params.right[cur])
    return params.value[node]


def tree_to_dict(params: TreeParams) -> dict:
    # Leaf thresholds are NaN internally; store them as null for strict JSON.
    thresholds = [
        None if f < 0 else t for f, t in zip(params.feature.tolist(), params.threshold.tolist())
    ]
    return {
        "feature": params.feature.tolist(),
        "threshold": thresholds,
        "left": params.left.tolist(),
        "right": params.right.tolist(),
        "value": params.value.tolist(),
        "n_samples": params.n_samples.tolist(),
    }


def tree_from_dict(d: dict) -> TreeParams:
    return TreeParams(
        feature=np.asarray(d["feature"], dtype=np.int32),
        threshold=np.asarray(
            [np.nan if t is None else t for t in d["threshold"]], dtype=np.float64
        ),
        left=np.asarray(d["left"], dtype=np.int32),
        right=np.asarray(d["right"], dtype=np.int32),
        value=np.asarray(d["value"], dtype=np.float64),
        n_samples=np.asarray(d["n_samples"], dtype=np.int32),
    )
