"""Global forecasters: one model over pooled series, identified by one-hot.

Recursive strategy serves the 1-24 h horizons (each step feeds its own
prediction back as the newest lag); direct multi-output serves the weekly
7/14/21/28-day targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from lagoontwin.core.types import SeriesKey
from lagoontwin.errors import UsageError
from lagoontwin.features.align import AlignedSeries
from lagoontwin.features.matrix import DesignMatrix, build_lag_matrix


class Regressor(Protocol):
    def predict(self, X: np.ndarray) -> np.ndarray: ...


def _one_hot(n: int, i: int) -> np.ndarray:
    out = np.zeros(n)
    out[i] = 1.0
    return out


@dataclass(frozen=True)
class GlobalForecaster:
    model: Regressor
    lags: int
    series_order: tuple[SeriesKey, ...]
    exog_order: tuple[SeriesKey, ...] = ()

    def forecast(
        self,
        history: dict[SeriesKey, np.ndarray],
        horizon: int,
        exog_future: dict[SeriesKey, np.ndarray] | None = None,
    ) -> dict[SeriesKey, np.ndarray]:
        """Recursive multi-step forecast for every known series in history.
        ``exog_future[key][k]`` is the exogenous value at step k+1."""
        if horizon < 1:
            raise UsageError("horizon must be >= 1")
        if self.exog_order:
            if exog_future is None:
                raise UsageError("model uses exogenous inputs; exog_future required")
            for key in self.exog_order:
                if key not in exog_future or len(exog_future[key]) < horizon:
                    raise UsageError(f"exog_future must cover {horizon} steps for {key}")
        # all requested series step forward together: one batched predict per step
        active: list[tuple[int, SeriesKey]] = []
        windows: list[np.ndarray] = []
        for sid, key in enumerate(self.series_order):
            if key not in history:
                continue
            window = np.asarray(history[key], dtype=np.float64)
            if len(window) < self.lags:
                raise UsageError(
                    f"history for {key} shorter than lag window {self.lags}"
                )
            active.append((sid, key))
            windows.append(window[-self.lags :].copy())
        if not active:
            return {}
        stacked = np.stack(windows)  # (n_active, lags)
        one_hot = np.zeros((len(active), len(self.series_order)))
        for row, (sid, _) in enumerate(active):
            one_hot[row, sid] = 1.0
        predictions = np.empty((len(active), horizon))
        for k in range(horizon):
            parts = [stacked[:, ::-1], one_hot]
            if self.exog_order:
                exog_block = np.array([exog_future[e][k] for e in self.exog_order])
                parts.append(np.tile(exog_block, (len(active), 1)))
            X = np.hstack(parts)
            step = np.asarray(self.model.predict(X), dtype=np.float64)
            predictions[:, k] = step
            stacked = np.hstack([stacked[:, 1:], step[:, None]])
        return {key: predictions[row] for row, (_, key) in enumerate(active)}


@dataclass(frozen=True)
class DirectForecaster:
    """One model per horizon; each predicts its target directly from the
    same lag window (no recursion)."""

    models: dict[int, Regressor]
    lags: int
    series_order: tuple[SeriesKey, ...]

    def forecast(
        self, history: dict[SeriesKey, np.ndarray], horizon: int, exog_future=None
    ) -> dict[SeriesKey, np.ndarray]:
        """Values at 1..horizon where trained horizons supply their step and
        intermediate steps interpolate is NOT done: only trained horizons are
        filled; use horizons() to know them."""
        if horizon not in self.models:
            raise UsageError(
                f"horizon {horizon} not trained; available: {sorted(self.models)}"
            )
        out: dict[SeriesKey, np.ndarray] = {}
        for sid, key in enumerate(self.series_order):
            if key not in history:
                continue
            window = np.asarray(history[key], dtype=np.float64)
            if len(window) < self.lags:
                raise UsageError(f"history for {key} shorter than lag window")
            x = np.concatenate(
                [window[-self.lags :][::-1], _one_hot(len(self.series_order), sid)]
            )
            out[key] = np.array([float(self.models[horizon].predict(x[None])[0])])
        return out

    def horizons(self) -> tuple[int, ...]:
        return tuple(sorted(self.models))


def fit_global(
    series_set: list[AlignedSeries],
    lags: int,
    model_factory,
    exog: list[AlignedSeries] | None = None,
    weight_mode: str = "target_only",
) -> GlobalForecaster:
    """Build the recursive-layout matrix over the pooled series and fit."""
    matrix = build_lag_matrix(series_set, lags=lags, exog=exog, weight_mode=weight_mode)
    if len(matrix) == 0:
        raise UsageError("series too short for the requested lag window")
    model = model_factory(matrix)
    return GlobalForecaster(
        model=model,
        lags=lags,
        series_order=matrix.series_order,
        exog_order=tuple(e.series for e in (exog or [])),
    )


def matrix_model_factory(fit_fn):
    """Adapt a (X, y, weights) -> model function to a DesignMatrix input."""

    def factory(matrix: DesignMatrix):
        return fit_fn(matrix.X, matrix.y, matrix.weights)

    return factory
