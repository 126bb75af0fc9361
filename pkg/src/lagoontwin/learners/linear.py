"""Weighted least-squares baseline with an intercept column."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lagoontwin.errors import UsageError


@dataclass(frozen=True)
class LinearModel:
    coef: np.ndarray
    intercept: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        return X @ self.coef + self.intercept


def fit_linear(X: np.ndarray, y: np.ndarray, weights: np.ndarray) -> LinearModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    positive = w > 0
    if not positive.any():
        raise UsageError("at least one weight must be positive")
    sw = np.sqrt(w[positive])
    design = np.hstack([X[positive], np.ones((positive.sum(), 1))])
    solution, *_ = np.linalg.lstsq(design * sw[:, None], y[positive] * sw, rcond=None)
    return LinearModel(coef=solution[:-1], intercept=float(solution[-1]))


@dataclass(frozen=True)
class NaivePersistence:
    """Predicts the most recent lag (feature column 0): the baseline every
    forecaster must beat."""

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        return X[:, 0].copy()
