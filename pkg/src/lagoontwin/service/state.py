"""Serving snapshots: build-then-swap in-memory state.

A request reads exactly one snapshot; reload builds a complete new snapshot
from the stores and publishes it atomically, so in-flight requests finish
on the old one. A failed build keeps the previous snapshot. ``loaded_at``
increases strictly across reloads.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from lagoontwin.config import Platform
from lagoontwin.context.store import ContextStore
from lagoontwin.core import timeutil
from lagoontwin.core.catalog import Catalog
from lagoontwin.core.types import Observation, SeriesKey
from lagoontwin.errors import UsageError
from lagoontwin.features.align import AlignedSeries, align_observations, impute_linear
from lagoontwin.registry import ModelEntry, ModelRegistry
from lagoontwin.runoff.scenario import RunoffModel

logger = logging.getLogger(__name__)

HOUR = timedelta(hours=1)
STALE_AFTER = timedelta(hours=2)


@dataclass
class ServeState:
    snapshot_id: int
    loaded_at: datetime
    catalog: Catalog
    window_data: dict[tuple[str, str, str], list[Observation]]
    context: ContextStore
    model_entries: list[ModelEntry]
    models: dict[str, object]  # entry name -> GlobalForecaster | RunoffModel
    forecast_cache: dict = field(default_factory=dict)

    def window_series(self, source: str, station: str, variable: str) -> list[Observation]:
        return self.window_data.get((source, station, variable), [])

    def series_for(self, station: str, variable: str) -> SeriesKey | None:
        """Resolve (station, variable) to a catalog key; deterministic pick
        when several sources carry the same station id."""
        for source in self.catalog.sources():
            descriptor = self.catalog.get(source)
            if descriptor.unit_of(variable) is None:
                continue
            if (source, station, variable) in self.window_data or self.catalog.station(
                source, station
            ):
                return self.catalog.series_key(source, station, variable)
        return None

    def is_stale(self, now: datetime | None = None) -> bool:
        now = now or timeutil.utcnow()
        return now - self.loaded_at > STALE_AFTER


def build_snapshot(platform: Platform, previous: ServeState | None) -> ServeState:
    now = timeutil.utcnow()
    if previous is not None and now <= previous.loaded_at:
        now = previous.loaded_at + timedelta(seconds=1)
    catalog = Catalog(platform.root)
    window_data: dict[tuple[str, str, str], list[Observation]] = {}
    for source, station, variable in platform.window.list_series():
        try:
            key = catalog.series_key(source, station, variable)
        except UsageError:
            continue  # series not registered in the catalog: not servable
        window_data[(source, station, variable)] = platform.window.read_all(key)
    registry = ModelRegistry(platform.root)
    entries = registry.entries()
    models: dict[str, object] = {}
    for entry in entries:
        if entry.kind.startswith("lstm"):
            models[entry.name] = registry.load_runoff(entry)
        else:
            models[entry.name] = registry.load_global(entry)
    return ServeState(
        snapshot_id=(previous.snapshot_id + 1) if previous else 1,
        loaded_at=now,
        catalog=catalog,
        window_data=window_data,
        context=ContextStore(platform.root),
        model_entries=entries,
        models=models,
    )


class StateHolder:
    """Owns the current snapshot; swap is atomic, reloads serialized."""

    def __init__(self, platform: Platform):
        self.platform = platform
        self._lock = threading.Lock()
        self._current = build_snapshot(platform, None)

    @property
    def current(self) -> ServeState:
        return self._current

    def reload(self) -> ServeState:
        with self._lock:
            try:
                fresh = build_snapshot(self.platform, self._current)
            except Exception:
                logger.exception("snapshot reload failed; keeping previous snapshot")
                return self._current
            self._current = fresh
            return fresh


# -- forecasting helpers ------------------------------------------------------


def _hold_single(series: AlignedSeries) -> AlignedSeries:
    """A window with one present value: hold it across the grid."""
    present = ~series.missing_mask
    value = float(series.values[present][0])
    values = np.full(len(series), value)
    mask = series.missing_mask.copy()
    return AlignedSeries(
        series=series.series, start=series.start, step=series.step,
        values=values, imputed_mask=mask,
    )


def aligned_window_series(
    snapshot: ServeState, key: SeriesKey, end: datetime, length: int
) -> AlignedSeries:
    """Hourly grid of the last ``length`` slots ending at ``end``, imputed."""
    observations = snapshot.window_series(*key.triple)
    start = end - (length - 1) * HOUR
    aligned = align_observations(observations, key, start, HOUR, length)
    present = int((~aligned.missing_mask).sum())
    if present == 0:
        raise UsageError(f"no window data for {key}")
    if present == 1:
        return _hold_single(aligned)
    return impute_linear(aligned)


def latest_hour(snapshot: ServeState, keys: list[SeriesKey]) -> datetime:
    """Most recent common hour across the given series."""
    ends = []
    for key in keys:
        observations = snapshot.window_series(*key.triple)
        if not observations:
            raise UsageError(f"no window data for {key}")
        epoch = timeutil.to_epoch(observations[-1].timestamp)
        ends.append((epoch // 3600) * 3600)
    return timeutil.from_epoch(min(ends))


def global_histories(
    snapshot: ServeState, entry: ModelEntry
) -> dict[SeriesKey, np.ndarray]:
    keys = list(entry.series_order)
    end = latest_hour(snapshot, keys)
    histories = {}
    for key in keys:
        aligned = aligned_window_series(snapshot, key, end, entry.lags)
        histories[key] = aligned.values
    return histories


def runoff_window(snapshot: ServeState, entry: ModelEntry, model: RunoffModel) -> np.ndarray:
    keys = []
    for name in model.feature_names:
        variable, station = name.split(":", 1)
        keys.append(snapshot.catalog.series_key(entry.source_id, station, variable))
    end = latest_hour(snapshot, keys)
    columns = [
        aligned_window_series(snapshot, key, end, model.window).values for key in keys
    ]
    return np.stack(columns, axis=1)
