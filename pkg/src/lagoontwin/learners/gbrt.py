"""Gradient-boosted regression trees, squared-error loss, fit stagewise to
residuals. One family with hyperparameter presets stands in for the usual
zoo of commercial boosting libraries; the selection machinery (backtest +
champion pick) is what matters at this scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lagoontwin.errors import UsageError
from lagoontwin.learners.tree import RegressionTree, fit_tree


@dataclass(frozen=True)
class HyperParams:
    n_trees: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_leaf: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 0:
            raise UsageError("n_trees must be nonnegative")
        if not 0.0 < self.learning_rate <= 1.0:
            raise UsageError("learning_rate must be in (0, 1]")
        if self.max_depth < 0:
            raise UsageError("max_depth must be nonnegative")
        if self.min_samples_leaf < 1:
            raise UsageError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class GbrtModel:
    base_score: float
    trees: tuple[RegressionTree, ...]
    learning_rate: float
    params: HyperParams
    training_loss: tuple[float, ...] = field(default=(), compare=False)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        out = np.full(len(X), self.base_score)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out


def fit_gbrt(
    X: np.ndarray, y: np.ndarray, weights: np.ndarray, params: HyperParams
) -> GbrtModel:
    """Stagewise fit; per-stage training loss (weighted MSE) is recorded and
    is non-increasing by construction."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if (w > 0).sum() == 0:
        raise UsageError("at least one weight must be positive")

    w_sum = w.sum()
    base = float((w * y).sum() / w_sum)
    pred = np.full(len(y), base)
    trees: list[RegressionTree] = []
    losses: list[float] = []
    for _ in range(params.n_trees):
        residual = y - pred
        tree = fit_tree(X, residual, w, params.max_depth, params.min_samples_leaf)
        trees.append(tree)
        pred = pred + params.learning_rate * tree.predict(X)
        losses.append(float((w * (y - pred) ** 2).sum() / w_sum))
    return GbrtModel(
        base_score=base,
        trees=tuple(trees),
        learning_rate=params.learning_rate,
        params=params,
        training_loss=tuple(losses),
    )
