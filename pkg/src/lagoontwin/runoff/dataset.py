"""Run-off training data: sliding windows of multi-station inputs.

The base configuration is streamflow at 7 locations plus rain at 10 gauges
(input width 17); the weather-forecast block adds precipitation,
temperature, and humidity forecasts from 7 stations (width 38). Column
names are "<variable>:<station>"; the variable part decides which columns a
scenario may perturb. Features and target carry their own median/IQR
scalers, fitted on the chronological training split only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lagoontwin.errors import UsageError
from lagoontwin.features.align import AlignedSeries
from lagoontwin.features.scaling import RobustScaler

BASE_STREAMFLOW_STATIONS = 7
BASE_RAIN_GAUGES = 10
FORECAST_VARIABLES = ("precipitation_forecast", "temperature_forecast", "humidity_forecast")
FORECAST_STATIONS = 7

EXOGENOUS_VARIABLES = ("rain",) + FORECAST_VARIABLES


def feature_name(variable: str, station: str) -> str:
    return f"{variable}:{station}"


def variable_of(name: str) -> str:
    return name.split(":", 1)[0]


@dataclass
class RunoffDataset:
    sequences: np.ndarray        # (n, window, width), scaled
    targets_scaled: np.ndarray   # (n,)
    target_timestamps: np.ndarray  # (n,) epoch seconds
    feature_names: tuple[str, ...]
    feature_scaler: RobustScaler
    target_scaler: RobustScaler
    train_indices: np.ndarray
    val_indices: np.ndarray
    test_indices: np.ndarray
    station: str
    horizon: int
    window: int

    @property
    def input_width(self) -> int:
        return self.sequences.shape[2]

    def inverse_target(self, scaled: float) -> float:
        return float(self.target_scaler.inverse_transform(np.array([scaled]))[0])


def build_dataset(
    features: list[AlignedSeries],
    target: AlignedSeries,
    horizon: int,
    window: int,
    fractions: tuple[float, float, float] = (0.7, 0.1, 0.2),
) -> RunoffDataset:
    """Windows end at t, targets at t+horizon; split chronologically by
    window end time. Scalers are fitted on the training rows only."""
    if horizon < 1 or window < 1:
        raise UsageError("horizon and window must be >= 1")
    if not features:
        raise UsageError("need at least one feature series")
    n = len(target)
    for s in features:
        if len(s) != n:
            raise UsageError("all series must share one grid length")
        if s.missing_mask.any():
            raise UsageError(f"feature series {s.series} has missing values; impute first")
    if target.missing_mask.any():
        raise UsageError("target series has missing values; impute first")
    if (target.values < 0).any():
        raise UsageError("run-off targets must be nonnegative")

    names = tuple(
        feature_name(s.series.variable, s.series.station_id) for s in features
    )
    raw = np.stack([s.values for s in features], axis=1)  # (n, width)
    ends = np.arange(window - 1, n - horizon)
    if len(ends) == 0:
        raise UsageError("series too short for the requested window and horizon")
    step_s = int(target.step.total_seconds())
    start_epoch = int(target.start.timestamp())

    n_rows = len(ends)
    n_val = int(n_rows * fractions[1])
    n_test = int(n_rows * fractions[2])
    n_train = n_rows - n_val - n_test
    if min(n_train, n_val, n_test) <= 0:
        raise UsageError("not enough rows for a 70/10/20 chronological split")
    train_idx = np.arange(0, n_train)
    val_idx = np.arange(n_train, n_train + n_val)
    test_idx = np.arange(n_train + n_val, n_rows)

    train_rows = raw[: ends[n_train - 1] + 1]  # rows visible to training windows
    feature_scaler = RobustScaler.fit(train_rows)
    target_train = target.values[ends[train_idx] + horizon]
    target_scaler = RobustScaler.fit(target_train[:, None])

    scaled = feature_scaler.transform(raw)
    sequences = np.stack([scaled[e - window + 1 : e + 1] for e in ends])
    targets = target.values[ends + horizon]
    targets_scaled = target_scaler.transform(targets[:, None])[:, 0]

    return RunoffDataset(
        sequences=sequences,
        targets_scaled=targets_scaled,
        target_timestamps=(start_epoch + (ends + horizon) * step_s).astype(np.int64),
        feature_names=names,
        feature_scaler=feature_scaler,
        target_scaler=target_scaler,
        train_indices=train_idx,
        val_indices=val_idx,
        test_indices=test_idx,
        station=target.series.station_id,
        horizon=horizon,
        window=window,
    )
