"""Seeded synthetic data: the desk-scale stand-in for live institutions.

Each (station, variable) series is a base level plus a daily sinusoid plus
AR(1) noise, with points dropped independently at the missing probability.
The generator is fully deterministic: the per-series RNG stream is derived
from (seed, station_id, variable), so output does not depend on iteration
order.
"""

from __future__ import annotations

import math
import zlib
from collections.abc import Callable
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from lagoontwin.core import timeutil
from lagoontwin.core.types import Observation, Quality, SeriesKey, StationMeta
from lagoontwin.errors import UsageError
from lagoontwin.ingest.adapters import FieldMapping, RawRecord

DAY_SECONDS = 86400.0


@dataclass(frozen=True)
class SyntheticVariable:
    variable: str
    unit: str
    base: float
    daily_amplitude: float
    ar_coeff: float
    noise_std: float
    missing_prob: float = 0.0

    def __post_init__(self) -> None:
        if not abs(self.ar_coeff) < 1.0:
            raise UsageError(f"AR coefficient must be inside (-1,1): {self.ar_coeff}")
        if not 0.0 <= self.missing_prob < 1.0:
            raise UsageError(f"missing probability must be in [0,1): {self.missing_prob}")
        if self.noise_std < 0:
            raise UsageError("noise stddev must be nonnegative")


@dataclass(frozen=True)
class SyntheticSpec:
    source_id: str
    seed: int
    variables: tuple[SyntheticVariable, ...]
    stations: tuple[StationMeta, ...]
    granularity: timedelta

    def __post_init__(self) -> None:
        if self.granularity <= timedelta(0):
            raise UsageError("granularity must be positive")
        if not self.variables or not self.stations:
            raise UsageError("spec needs at least one variable and one station")


def _series_rng(seed: int, station_id: str, variable: str) -> np.random.Generator:
    return np.random.default_rng(
        [seed, zlib.crc32(station_id.encode()), zlib.crc32(variable.encode())]
    )


def synthesize(
    spec: SyntheticSpec, start: datetime, end: datetime
) -> list[Observation]:
    """Generate observations on the grid [start, end)."""
    start = timeutil.as_utc_second(start)
    end = timeutil.as_utc_second(end)
    if start >= end:
        raise UsageError("start must be before end")
    step = int(spec.granularity.total_seconds())
    epochs = np.arange(timeutil.to_epoch(start), timeutil.to_epoch(end), step)

    out: list[Observation] = []
    for station in spec.stations:
        for var in spec.variables:
            rng = _series_rng(spec.seed, station.station_id, var.variable)
            n = len(epochs)
            noise = np.empty(n)
            if var.noise_std > 0:
                stationary_std = var.noise_std / math.sqrt(1 - var.ar_coeff**2)
                level = rng.normal(0.0, stationary_std)
                shocks = rng.normal(0.0, var.noise_std, size=n)
                for i in range(n):
                    level = var.ar_coeff * level + shocks[i]
                    noise[i] = level
            else:
                noise[:] = 0.0
            phase = 2.0 * math.pi * (epochs % int(DAY_SECONDS)) / DAY_SECONDS
            values = var.base + var.daily_amplitude * np.sin(phase) + noise
            dropped = rng.random(n) < var.missing_prob
            series = SeriesKey(
                source_id=spec.source_id,
                station_id=station.station_id,
                variable=var.variable,
                unit=var.unit,
            )
            for epoch, value, drop in zip(epochs, values, dropped):
                if drop:
                    continue
                ts = timeutil.from_epoch(int(epoch))
                out.append(
                    Observation(
                        series=series,
                        timestamp=ts,
                        value=float(value),
                        quality=Quality.MEASURED,
                        ingested_at=ts,
                    )
                )
    out.sort(key=lambda o: (o.series.triple, o.timestamp))
    return out


class SyntheticAdapter:
    """Exposes the generator through the adapter interface so synthetic
    sources flow through the same mediator path as real ones."""

    def __init__(
        self,
        spec: SyntheticSpec,
        now_fn: Callable[[], datetime] | None = None,
    ):
        self.spec = spec
        self.source_id = spec.source_id
        self.mapping = {
            v.variable: FieldMapping(variable=v.variable, unit=v.unit)
            for v in spec.variables
        }
        self.decimal_comma = False
        self._now_fn = now_fn or timeutil.utcnow

    def poll(self, since: datetime) -> list[RawRecord]:
        now = self._now_fn()
        if since >= now:
            return []
        observations = synthesize(self.spec, since, now)
        return [
            RawRecord(
                station_id=o.series.station_id,
                timestamp=o.timestamp,
                field_name=o.series.variable,
                value=repr(o.value),
            )
            for o in observations
            if o.timestamp > since
        ]
