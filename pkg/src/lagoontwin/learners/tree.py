"""Greedy regression tree under weighted squared error.

Split candidates are the midpoints between consecutive distinct sorted
feature values among positive-weight rows; zero-weight rows contribute
nothing to gains or leaf values. The best split maximizes the weighted
SSE reduction, ties broken by (feature index, threshold); a node becomes a
leaf when no split has positive gain or a constraint blocks all candidates.
Rows with x <= threshold go left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lagoontwin.errors import UsageError

GAIN_EPS = 1e-12


@dataclass(frozen=True)
class TreeNode:
    feature: int     # -1 marks a leaf
    threshold: float
    left: int
    right: int
    value: float     # weighted mean of targets at this node


@dataclass(frozen=True)
class RegressionTree:
    nodes: tuple[TreeNode, ...]
    max_depth: int
    min_samples_leaf: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        out = np.empty(len(X))
        stack = [(0, np.arange(len(X)))]
        while stack:
            node_id, rows = stack.pop()
            node = self.nodes[node_id]
            if node.feature < 0:
                out[rows] = node.value
                continue
            go_left = X[rows, node.feature] <= node.threshold
            stack.append((node.left, rows[go_left]))
            stack.append((node.right, rows[~go_left]))
        return out

    @property
    def n_leaves(self) -> int:
        return sum(1 for n in self.nodes if n.feature < 0)


def _best_split(
    X: np.ndarray, y: np.ndarray, w: np.ndarray, min_samples_leaf: int
) -> tuple[int, float, float] | None:
    """(feature, threshold, gain) of the best candidate, or None."""
    total_w = w.sum()
    total_wy = (w * y).sum()
    total_wy2 = (w * y * y).sum()
    sse_parent = total_wy2 - total_wy * total_wy / total_w

    best: tuple[float, int, float] | None = None  # (-gain proxy via comparisons)
    n = len(y)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ws = w[order]
        ys = y[order]
        cut = np.flatnonzero(xs[:-1] < xs[1:])  # boundary after index i
        if len(cut) == 0:
            continue
        left_n = cut + 1
        right_n = n - left_n
        valid = (left_n >= min_samples_leaf) & (right_n >= min_samples_leaf)
        if not valid.any():
            continue
        cw = np.cumsum(ws)
        cwy = np.cumsum(ws * ys)
        cwy2 = np.cumsum(ws * ys * ys)
        lw, lwy, lwy2 = cw[cut], cwy[cut], cwy2[cut]
        rw, rwy, rwy2 = total_w - lw, total_wy - lwy, total_wy2 - lwy2
        sse_left = lwy2 - lwy * lwy / lw
        sse_right = rwy2 - rwy * rwy / rw
        gains = np.where(valid, sse_parent - sse_left - sse_right, -np.inf)
        local_best = int(np.argmax(gains))  # first occurrence: lowest threshold
        gain = float(gains[local_best])
        if best is None or gain > best[0]:
            i = cut[local_best]
            threshold = (xs[i] + xs[i + 1]) / 2.0
            best = (gain, f, threshold)
    if best is None or best[0] <= GAIN_EPS:
        return None
    gain, feature, threshold = best
    return feature, threshold, gain


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    max_depth: int,
    min_samples_leaf: int = 1,
) -> RegressionTree:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y) or len(y) != len(w):
        raise UsageError("X, y, weights must agree in row count")
    if (w < 0).any():
        raise UsageError("weights must be nonnegative")
    positive = w > 0
    if not positive.any():
        raise UsageError("at least one weight must be positive")
    Xp, yp, wp = X[positive], y[positive], w[positive]

    nodes: list[TreeNode] = []

    def build(rows: np.ndarray, depth: int) -> int:
        sub_w = wp[rows]
        value = float((sub_w * yp[rows]).sum() / sub_w.sum())
        node_id = len(nodes)
        nodes.append(TreeNode(-1, np.nan, -1, -1, value))
        if depth >= max_depth or len(rows) < 2 * min_samples_leaf:
            return node_id
        split = _best_split(Xp[rows], yp[rows], sub_w, min_samples_leaf)
        if split is None:
            return node_id
        feature, threshold, _ = split
        go_left = Xp[rows, feature] <= threshold
        left_id = build(rows[go_left], depth + 1)
        right_id = build(rows[~go_left], depth + 1)
        nodes[node_id] = TreeNode(feature, threshold, left_id, right_id, value)
        return node_id

    build(np.arange(len(yp)), 0)
    return RegressionTree(
        nodes=tuple(nodes), max_depth=max_depth, min_samples_leaf=min_samples_leaf
    )
