"""Independent brute-force oracle for the greedy tree fitter.

Evaluates every candidate split at every node by direct weighted-SSE
computation over the exhaustively enumerated split sequences the greedy
rule admits (no prefix-sum scanning, no sort tricks), with the same
tie-break order. Used to verify the optimized implementation.
"""

from __future__ import annotations

import numpy as np

GAIN_EPS = 1e-12


def weighted_sse(y: np.ndarray, w: np.ndarray) -> float:
    total = w.sum()
    if total == 0:
        return 0.0
    mean = (w * y).sum() / total
    return float((w * (y - mean) ** 2).sum())


def brute_force_best_split(X, y, w, min_leaf):
    parent = weighted_sse(y, w)
    best = None
    for f in range(X.shape[1]):
        values = np.unique(X[:, f])
        for a, b in zip(values, values[1:]):
            threshold = (a + b) / 2.0
            left = X[:, f] <= threshold
            if left.sum() < min_leaf or (~left).sum() < min_leaf:
                continue
            gain = parent - weighted_sse(y[left], w[left]) - weighted_sse(y[~left], w[~left])
            if best is None or gain > best[0]:
                best = (gain, f, threshold)
    if best is None or best[0] <= GAIN_EPS:
        return None
    return best[1], best[2]


def brute_force_predictions(X, y, w, max_depth, min_leaf=1):
    """Training-set predictions of the brute-force greedy tree."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    positive = w > 0
    out = np.empty(len(y))

    def fit(rows_mask: np.ndarray, depth: int) -> None:
        rows = rows_mask & positive
        mean = (w[rows] * y[rows]).sum() / w[rows].sum()
        if depth >= max_depth or rows.sum() < 2 * min_leaf:
            out[rows_mask] = mean
            return
        split = brute_force_best_split(X[rows], y[rows], w[rows], min_leaf)
        if split is None:
            out[rows_mask] = mean
            return
        feature, threshold = split
        go_left = X[:, feature] <= threshold
        fit(rows_mask & go_left, depth + 1)
        fit(rows_mask & ~go_left, depth + 1)

    fit(np.ones(len(y), dtype=bool), 0)
    return out


def brute_force_training_loss(X, y, w, max_depth, min_leaf=1) -> float:
    predictions = brute_force_predictions(X, y, w, max_depth, min_leaf)
    return float((np.asarray(w) * (np.asarray(y) - predictions) ** 2).sum())
