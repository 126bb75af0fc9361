"""Domain types shared by every module.

All types are immutable values and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum

from lagoontwin.core import timeutil
from lagoontwin.errors import UsageError


class Quality(str, Enum):
    MEASURED = "measured"
    IMPUTED = "imputed"
    REJECTED = "rejected"


@dataclass(frozen=True, order=True)
class SeriesKey:
    """Identity of one variable at one station.

    (source_id, station_id, variable) is globally unique; the unit is fixed
    for the lifetime of the key.
    """

    source_id: str
    station_id: str
    variable: str
    unit: str = field(compare=False)

    def __post_init__(self) -> None:
        for name in ("source_id", "station_id", "variable"):
            if not getattr(self, name):
                raise UsageError(f"SeriesKey.{name} must be non-empty")

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.source_id, self.station_id, self.variable)

    def __str__(self) -> str:
        return f"{self.source_id}/{self.station_id}/{self.variable}"


@dataclass(frozen=True)
class Observation:
    """One timestamped sensor reading.

    ``quality=imputed`` values are produced only by the imputation step,
    never by an adapter. NaN is represented by absence, never stored.
    """

    series: SeriesKey
    timestamp: datetime
    value: float
    quality: Quality = Quality.MEASURED
    ingested_at: datetime | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamp", timeutil.as_utc_second(self.timestamp))
        ingested = self.ingested_at if self.ingested_at is not None else self.timestamp
        object.__setattr__(self, "ingested_at", timeutil.as_utc_second(ingested))
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise UsageError(f"observation value must be finite, got {self.value!r}")
        if self.timestamp > self.ingested_at:
            raise UsageError(
                f"timestamp {self.timestamp} is after ingested_at {self.ingested_at}"
            )


@dataclass(frozen=True)
class StationMeta:
    """Geolocation of a station; station_id is unique within its source."""

    station_id: str
    name: str
    latitude: float
    longitude: float
    source_id: str

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise UsageError(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise UsageError(f"longitude out of range: {self.longitude}")


class Aggregation(str, Enum):
    """How observations of a variable combine within a resample bucket."""

    MEAN = "mean"   # states: temperature, level, salinity, ...
    SUM = "sum"     # fluxes: precipitation
    LAST = "last"


@dataclass(frozen=True)
class DatasetDescriptor:
    """Catalog entry for one data source."""

    source_id: str
    field_area: str
    start_date: datetime
    variables: tuple[tuple[str, str], ...]  # (variable, unit)
    native_granularity: timedelta
    publish_schedule: str  # cron-style expression
    aggregation: tuple[tuple[str, str], ...] = ()  # (variable, Aggregation value)

    def __post_init__(self) -> None:
        if self.native_granularity <= timedelta(0):
            raise UsageError("native_granularity must be positive")
        if not self.variables:
            raise UsageError("descriptor needs at least one variable")
        object.__setattr__(self, "start_date", timeutil.as_utc_second(self.start_date))
        object.__setattr__(self, "variables", tuple((v, u) for v, u in self.variables))
        object.__setattr__(
            self, "aggregation", tuple((v, a) for v, a in self.aggregation)
        )

    def unit_of(self, variable: str) -> str | None:
        for var, unit in self.variables:
            if var == variable:
                return unit
        return None

    def aggregation_of(self, variable: str) -> Aggregation:
        for var, agg in self.aggregation:
            if var == variable:
                return Aggregation(agg)
        return Aggregation.MEAN


@dataclass(frozen=True)
class MetricReport:
    """Evaluation summary. ``cvrmse`` is in percent and absent (None) when
    the mean of the actuals is numerically zero."""

    mae: float
    cvrmse: float | None
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise UsageError("MetricReport needs at least one evaluated point")
        if self.mae < 0:
            raise UsageError("mae must be nonnegative")
