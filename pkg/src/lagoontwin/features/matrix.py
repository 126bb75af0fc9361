"""Supervised-learning matrices from pooled aligned series.

Row layout for (series s, time t), t >= L:

    features = [y_{t-1}, ..., y_{t-L}, one-hot(s), exog at target time]
    target   = y_t (recursive) or [y_{t+h-1} for h in horizons] (direct)

Sample weights are {0,1}: a row whose target slot was imputed gets weight 0
so the loss never fits fabricated values; rows merely *using* imputed values
as lag features keep weight 1 (``weight_mode="any_touch"`` zeroes those too).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from lagoontwin.core.types import SeriesKey
from lagoontwin.errors import UsageError
from lagoontwin.features.align import AlignedSeries

WEIGHT_TARGET_ONLY = "target_only"
WEIGHT_ANY_TOUCH = "any_touch"


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray              # (n, d)
    y: np.ndarray              # (n,) recursive or (n, len(horizons)) direct
    weights: np.ndarray        # (n,), values in {0, 1}
    timestamps: np.ndarray     # (n,), epoch seconds of the base time t
    series_ids: np.ndarray     # (n,), index into series_order
    feature_names: tuple[str, ...]
    series_order: tuple[SeriesKey, ...]
    lags: int
    horizons: tuple[int, ...]  # () for recursive mode

    def __len__(self) -> int:
        return len(self.X)

    @property
    def recursive(self) -> bool:
        return self.horizons == ()


def _check_grids(series_set: list[AlignedSeries]) -> None:
    step = series_set[0].step
    for s in series_set:
        if s.step != step:
            raise UsageError("all series must share the grid step")
        if s.missing_mask.any():
            raise UsageError(f"series {s.series} still has missing values; impute first")


def build_lag_matrix(
    series_set: list[AlignedSeries],
    lags: int,
    horizons: tuple[int, ...] = (),
    exog: list[AlignedSeries] | None = None,
    weight_mode: str = WEIGHT_TARGET_ONLY,
) -> DesignMatrix:
    """Pool series into one design matrix. ``horizons=()`` builds the
    recursive (one-step target) layout; a nonempty tuple builds direct
    multi-horizon targets."""
    if lags < 1:
        raise UsageError("need at least one lag")
    if not series_set:
        raise UsageError("empty series set")
    if weight_mode not in (WEIGHT_TARGET_ONLY, WEIGHT_ANY_TOUCH):
        raise UsageError(f"unknown weight mode {weight_mode!r}")
    _check_grids(series_set)
    exog = exog or []
    for e in exog:
        if e.missing_mask.any():
            raise UsageError(f"exogenous series {e.series} has missing values")

    order = tuple(s.series for s in series_set)
    n_series = len(order)
    feature_names = tuple(
        [f"lag_{i}" for i in range(1, lags + 1)]
        + [f"series={key}" for key in order]
        + [f"exog={e.series.variable}:{e.series.station_id}" for e in exog]
    )
    max_ahead = max(horizons) if horizons else 1

    rows_X: list[np.ndarray] = []
    rows_y: list[np.ndarray] = []
    rows_w: list[float] = []
    rows_ts: list[int] = []
    rows_sid: list[int] = []
    for sid, aligned in enumerate(series_set):
        values = aligned.values
        mask = aligned.imputed_mask
        n = len(values)
        start_epoch = int(aligned.start.timestamp())
        step_s = int(aligned.step.total_seconds())
        one_hot = np.zeros(n_series)
        one_hot[sid] = 1.0
        for t in range(lags, n - max_ahead + 1):
            lag_block = values[t - lags : t][::-1]  # [y_{t-1}, ..., y_{t-L}]
            exog_block = np.array([e.values[t] for e in exog]) if exog else np.empty(0)
            features = np.concatenate([lag_block, one_hot, exog_block])
            if horizons:
                target = np.array([values[t + h - 1] for h in horizons])
                target_imputed = any(mask[t + h - 1] for h in horizons)
            else:
                target = np.array([values[t]])
                target_imputed = bool(mask[t])
            weight = 0.0 if target_imputed else 1.0
            if weight_mode == WEIGHT_ANY_TOUCH and mask[t - lags : t].any():
                weight = 0.0
            rows_X.append(features)
            rows_y.append(target)
            rows_w.append(weight)
            rows_ts.append(start_epoch + t * step_s)
            rows_sid.append(sid)

    if not rows_X:
        d = lags + n_series + len(exog)
        return DesignMatrix(
            X=np.empty((0, d)),
            y=np.empty((0,) if not horizons else (0, len(horizons))),
            weights=np.empty(0),
            timestamps=np.empty(0, dtype=np.int64),
            series_ids=np.empty(0, dtype=np.int64),
            feature_names=feature_names,
            series_order=order,
            lags=lags,
            horizons=tuple(horizons),
        )

    X = np.vstack(rows_X)
    y = np.vstack(rows_y)
    if not horizons:
        y = y[:, 0]
    sort = np.lexsort((np.array(rows_sid), np.array(rows_ts)))
    return DesignMatrix(
        X=X[sort],
        y=y[sort],
        weights=np.array(rows_w)[sort],
        timestamps=np.array(rows_ts, dtype=np.int64)[sort],
        series_ids=np.array(rows_sid, dtype=np.int64)[sort],
        feature_names=feature_names,
        series_order=order,
        lags=lags,
        horizons=tuple(horizons),
    )


def _slice(matrix: DesignMatrix, idx: slice) -> DesignMatrix:
    return DesignMatrix(
        X=matrix.X[idx],
        y=matrix.y[idx],
        weights=matrix.weights[idx],
        timestamps=matrix.timestamps[idx],
        series_ids=matrix.series_ids[idx],
        feature_names=matrix.feature_names,
        series_order=matrix.series_order,
        lags=matrix.lags,
        horizons=matrix.horizons,
    )


def chrono_split(
    matrix: DesignMatrix, fractions: tuple[float, float, float] = (0.7, 0.1, 0.2)
) -> tuple[DesignMatrix, DesignMatrix, DesignMatrix]:
    """Contiguous time blocks: floor allocation with the remainder assigned
    to train; rows sharing a timestamp never straddle a boundary, so every
    train timestamp < every validation timestamp < every test timestamp."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise UsageError("fractions must sum to 1")
    n = len(matrix)
    if n == 0:
        raise UsageError("cannot split an empty matrix")
    ts = matrix.timestamps
    if (np.diff(ts) < 0).any():
        raise UsageError("matrix rows must be sorted by timestamp")

    n_val = int(n * fractions[1])
    n_test = int(n * fractions[2])
    n_train = n - n_val - n_test

    def extend_to_boundary(k: int) -> int:
        # push the cut forward so equal timestamps stay in the earlier block
        while 0 < k < n and ts[k] == ts[k - 1]:
            k += 1
        return k

    train_end = extend_to_boundary(n_train)
    val_end = extend_to_boundary(train_end + n_val)
    train = _slice(matrix, slice(0, train_end))
    val = _slice(matrix, slice(train_end, val_end))
    test = _slice(matrix, slice(val_end, n))
    if len(train) == 0 or len(val) == 0 or len(test) == 0:
        raise UsageError(
            f"split produced an empty partition: {len(train)}/{len(val)}/{len(test)}"
        )
    return train, val, test
