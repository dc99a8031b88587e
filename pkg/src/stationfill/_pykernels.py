"""Numpy fallback for the hot kernels.

Mirrors ``_ckernels`` operation for operation. The tree-split scan keeps the
same arithmetic order as the compiled loop (np.cumsum accumulates
sequentially, exactly like the C running sum), so a tree grown on either
backend is bit-identical. The SVR pass goes through BLAS dot products, which
may differ from the compiled loop in the last ulp; see tests/test_kernels.py.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def best_split(xs: np.ndarray, ys: np.ndarray, min_leaf: int) -> tuple[int, float, float]:
    """Best SSE-reduction split over presorted features.

    xs, ys: (d, n) arrays, row f = feature f's node values sorted ascending and
    the node-mean-centered targets in the same order. A split after sorted
    position i (left count i+1) is valid when both sides keep >= min_leaf rows
    and the feature actually changes across the boundary.

    Returns (feature, threshold, score) with score = sum_left^2/n_left +
    sum_right^2/n_right (maximizing it minimizes child SSE). Ties go to the
    lowest feature index, then the lowest threshold. feature == -1 when no
    valid split exists.
    """
    d, n = xs.shape
    best_f, best_thr, best_score = -1, float("nan"), -np.inf
    if n < 2 * min_leaf:
        return best_f, best_thr, best_score

    n_left = np.arange(1, n, dtype=np.float64)
    n_right = np.float64(n) - n_left
    for f in range(d):
        x = xs[f]
        cs = np.cumsum(ys[f])
        left_sum = cs[:-1]
        total = cs[-1]
        valid = (x[:-1] < x[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        score = left_sum * left_sum / n_left + (total - left_sum) * (total - left_sum) / n_right
        score = np.where(valid, score, -np.inf)
        j = int(np.argmax(score))  # first occurrence == lowest threshold
        if score[j] > best_score:
            best_f = f
            best_thr = (x[j] + x[j + 1]) * 0.5
            best_score = float(score[j])
    return best_f, float(best_thr), float(best_score)


def svr_pass(
    xb: np.ndarray,
    y: np.ndarray,
    beta: np.ndarray,
    w: np.ndarray,
    qii: np.ndarray,
    c: float,
    eps: float,
    order: np.ndarray,
) -> float:
    """One coordinate-descent sweep of the dual linear eps-insensitive SVR.

    xb: (n, d) bias-augmented rows; beta: (n,) dual coefficients in [-c, c];
    w: (d,) primal weights, kept equal to xb.T @ beta throughout. Both beta
    and w are updated in place. Returns the largest KKT violation seen.
    """
    max_viol = 0.0
    for i in order:
        x = xb[i]
        g = float(x @ w) - y[i]
        b = beta[i]

        if b == 0.0:
            viol = max(0.0, abs(g) - eps)
        elif b >= c:
            # Only a downward move is allowed at the upper box edge; it pays
            # off iff g > -eps (g <= -eps is the optimal bounded-SV state).
            viol = max(0.0, g + eps)
        elif b <= -c:
            viol = max(0.0, eps - g)
        elif b > 0.0:
            viol = abs(g + eps)
        else:
            viol = abs(g - eps)
        if viol > max_viol:
            max_viol = viol

        # 1-D subproblem: soft-threshold the Newton point, clip to the box.
        q = qii[i]
        z = b - g / q
        t = eps / q
        if z > t:
            nb = z - t
        elif z < -t:
            nb = z + t
        else:
            nb = 0.0
        nb = min(max(nb, -c), c)
        if nb != b:
            w += (nb - b) * x
            beta[i] = nb
    return float(max_viol)
