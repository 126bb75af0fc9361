"""Median/IQR scaling, robust to outliers.

Quantiles use linear interpolation between order statistics. A column with
zero IQR gets scale 1 so constant features map to zero instead of dividing
by zero. Fit on the training partition only; the leakage guard test in the
suite enforces that discipline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lagoontwin.errors import UsageError


@dataclass(frozen=True)
class RobustScaler:
    center: np.ndarray  # per-column median
    scale: np.ndarray   # per-column IQR, 1.0 substituted where IQR == 0
    version: int = 1

    @classmethod
    def fit(cls, X: np.ndarray) -> "RobustScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] == 0:
            raise UsageError("cannot fit a scaler on zero rows")
        center = np.median(X, axis=0)
        q75 = np.percentile(X, 75, axis=0)
        q25 = np.percentile(X, 25, axis=0)
        iqr = q75 - q25
        scale = np.where(iqr == 0.0, 1.0, iqr)
        return cls(center=center, scale=scale)

    def _shape(self, X: np.ndarray) -> tuple[np.ndarray, bool]:
        X = np.asarray(X, dtype=np.float64)
        was_1d = X.ndim == 1
        if was_1d:
            X = X[:, None]
        if X.shape[1] != len(self.center):
            raise UsageError(
                f"scaler fitted on {len(self.center)} columns, got {X.shape[1]}"
            )
        return X, was_1d

    def transform(self, X: np.ndarray) -> np.ndarray:
        X, was_1d = self._shape(X)
        out = (X - self.center) / self.scale
        return out[:, 0] if was_1d else out

    def inverse_transform(self, X: np.ndarray) -> np.ndarray:
        X, was_1d = self._shape(X)
        out = X * self.scale + self.center
        return out[:, 0] if was_1d else out
