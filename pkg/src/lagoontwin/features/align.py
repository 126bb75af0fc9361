"""Aligned series: regular time grids with explicit missing markers.

NaN marks a missing slot inside an AlignedSeries (observations themselves
never store NaN). Imputation fills interior gaps linearly and holds the
nearest edge value across leading/trailing gaps; the mask records exactly
which slots were filled.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from lagoontwin.core import timeutil
from lagoontwin.core.types import Observation, SeriesKey
from lagoontwin.errors import UsageError


@dataclass(frozen=True)
class AlignedSeries:
    series: SeriesKey
    start: datetime
    step: timedelta
    values: np.ndarray       # float64, NaN = missing
    imputed_mask: np.ndarray  # bool, True where a value was filled

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        mask = np.asarray(self.imputed_mask, dtype=bool)
        if values.shape != mask.shape or values.ndim != 1:
            raise UsageError("values and imputed_mask must be equal-length 1D arrays")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "imputed_mask", mask)
        object.__setattr__(self, "start", timeutil.as_utc_second(self.start))

    def __len__(self) -> int:
        return len(self.values)

    def timestamps(self) -> list[datetime]:
        return [self.start + i * self.step for i in range(len(self))]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)


def align_observations(
    observations: list[Observation],
    series: SeriesKey,
    start: datetime,
    step: timedelta,
    length: int,
) -> AlignedSeries:
    """Place observations onto the grid (floor to slot, last value wins).
    Slots without any observation are NaN."""
    start = timeutil.as_utc_second(start)
    step_s = int(step.total_seconds())
    if step_s <= 0 or length <= 0:
        raise UsageError("grid step and length must be positive")
    values = np.full(length, np.nan)
    start_epoch = timeutil.to_epoch(start)
    for obs in observations:
        slot = (timeutil.to_epoch(obs.timestamp) - start_epoch) // step_s
        if 0 <= slot < length:
            values[slot] = obs.value
    return AlignedSeries(
        series=series,
        start=start,
        step=step,
        values=values,
        imputed_mask=np.zeros(length, dtype=bool),
    )


def missing_fraction(series: AlignedSeries) -> float:
    """Fraction of missing slots between the first and last present values.
    A fully-missing series counts as fraction 1."""
    present = ~series.missing_mask
    if not present.any():
        return 1.0
    first, last = np.flatnonzero(present)[[0, -1]]
    window = series.missing_mask[first : last + 1]
    return float(window.mean())


def drop_sparse(
    series_set: list[AlignedSeries], threshold: float = 0.5
) -> tuple[list[AlignedSeries], list[tuple[SeriesKey, float]]]:
    """Remove series whose missing fraction exceeds the threshold (strict);
    returns (retained, dropped-with-fraction)."""
    retained: list[AlignedSeries] = []
    dropped: list[tuple[SeriesKey, float]] = []
    for series in series_set:
        fraction = missing_fraction(series)
        if fraction > threshold:
            dropped.append((series.series, fraction))
        else:
            retained.append(series)
    return retained, dropped


def impute_linear(series: AlignedSeries) -> AlignedSeries:
    """Fill interior gaps by linear interpolation between the nearest present
    neighbors; hold the nearest edge value across leading/trailing gaps."""
    missing = series.missing_mask
    present_idx = np.flatnonzero(~missing)
    if len(present_idx) < 2:
        raise UsageError("imputation needs at least 2 present values")
    if not missing.any():
        return series
    filled = series.values.copy()
    missing_idx = np.flatnonzero(missing)
    # np.interp interpolates interior points and holds edges constant
    filled[missing_idx] = np.interp(
        missing_idx, present_idx, series.values[present_idx]
    )
    mask = series.imputed_mask | missing
    return AlignedSeries(
        series=series.series,
        start=series.start,
        step=series.step,
        values=filled,
        imputed_mask=mask,
    )
