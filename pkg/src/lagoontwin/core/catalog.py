"""Dataset catalog: which sources exist, their variables, units, stations.

Persisted as one JSON document per source under ``<root>/catalog/``; the
schema is documented in docs/format.md. The catalog is the unit authority:
SeriesKeys should be minted through :meth:`Catalog.series_key`.
"""

from __future__ import annotations

import json
from datetime import timedelta
from pathlib import Path

from lagoontwin.core import timeutil
from lagoontwin.core.types import DatasetDescriptor, SeriesKey, StationMeta
from lagoontwin.errors import ConflictError, UsageError


def _descriptor_to_doc(d: DatasetDescriptor) -> dict:
    return {
        "source_id": d.source_id,
        "field_area": d.field_area,
        "start_date": timeutil.format_rfc3339(d.start_date),
        "variables": [{"variable": v, "unit": u} for v, u in d.variables],
        "native_granularity_s": int(d.native_granularity.total_seconds()),
        "publish_schedule": d.publish_schedule,
        "aggregation": {v: a for v, a in d.aggregation},
    }


def _descriptor_from_doc(doc: dict) -> DatasetDescriptor:
    return DatasetDescriptor(
        source_id=doc["source_id"],
        field_area=doc["field_area"],
        start_date=timeutil.parse_rfc3339(doc["start_date"]),
        variables=tuple((v["variable"], v["unit"]) for v in doc["variables"]),
        native_granularity=timedelta(seconds=doc["native_granularity_s"]),
        publish_schedule=doc["publish_schedule"],
        aggregation=tuple(doc.get("aggregation", {}).items()),
    )


class Catalog:
    """In-memory catalog with JSON persistence, one document per source."""

    def __init__(self, root: Path | None = None):
        self._root = Path(root) if root is not None else None
        self._descriptors: dict[str, DatasetDescriptor] = {}
        self._stations: dict[str, dict[str, StationMeta]] = {}
        if self._root is not None:
            self._load()

    def _dir(self) -> Path:
        assert self._root is not None
        return self._root / "catalog"

    def _load(self) -> None:
        directory = self._dir()
        if not directory.is_dir():
            return
        for path in sorted(directory.glob("*.json")):
            doc = json.loads(path.read_text())
            descriptor = _descriptor_from_doc(doc["descriptor"])
            self._descriptors[descriptor.source_id] = descriptor
            self._stations[descriptor.source_id] = {
                s["station_id"]: StationMeta(
                    station_id=s["station_id"],
                    name=s["name"],
                    latitude=s["latitude"],
                    longitude=s["longitude"],
                    source_id=descriptor.source_id,
                )
                for s in doc.get("stations", [])
            }

    def _save(self, source_id: str) -> None:
        if self._root is None:
            return
        directory = self._dir()
        directory.mkdir(parents=True, exist_ok=True)
        doc = {
            "descriptor": _descriptor_to_doc(self._descriptors[source_id]),
            "stations": [
                {
                    "station_id": s.station_id,
                    "name": s.name,
                    "latitude": s.latitude,
                    "longitude": s.longitude,
                }
                for s in sorted(
                    self._stations.get(source_id, {}).values(),
                    key=lambda s: s.station_id,
                )
            ],
        }
        tmp = directory / f".{source_id}.json.tmp"
        tmp.write_text(json.dumps(doc, indent=2) + "\n")
        tmp.replace(directory / f"{source_id}.json")

    def register(self, descriptor: DatasetDescriptor) -> str:
        """Register a source. Identical re-registration is a no-op;
        a conflicting one raises."""
        existing = self._descriptors.get(descriptor.source_id)
        if existing is not None:
            if existing == descriptor:
                return descriptor.source_id
            raise ConflictError(
                f"source {descriptor.source_id!r} already registered with a "
                "different descriptor"
            )
        self._descriptors[descriptor.source_id] = descriptor
        self._stations.setdefault(descriptor.source_id, {})
        self._save(descriptor.source_id)
        return descriptor.source_id

    def register_stations(self, source_id: str, stations: list[StationMeta]) -> None:
        self.get(source_id)  # must exist
        table = self._stations.setdefault(source_id, {})
        for station in stations:
            if station.source_id != source_id:
                raise UsageError(
                    f"station {station.station_id} declares source "
                    f"{station.source_id!r}, not {source_id!r}"
                )
            existing = table.get(station.station_id)
            if existing is not None and existing != station:
                raise ConflictError(
                    f"station {station.station_id!r} already registered "
                    f"differently in {source_id!r}"
                )
            table[station.station_id] = station
        self._save(source_id)

    def get(self, source_id: str) -> DatasetDescriptor:
        try:
            return self._descriptors[source_id]
        except KeyError:
            raise UsageError(f"unknown source {source_id!r}") from None

    def sources(self) -> list[str]:
        return sorted(self._descriptors)

    def stations(self, source_id: str | None = None) -> list[StationMeta]:
        if source_id is not None:
            return sorted(
                self._stations.get(source_id, {}).values(),
                key=lambda s: s.station_id,
            )
        return [
            station
            for sid in sorted(self._stations)
            for station in self.stations(sid)
        ]

    def station(self, source_id: str, station_id: str) -> StationMeta | None:
        return self._stations.get(source_id, {}).get(station_id)

    def series_key(self, source_id: str, station_id: str, variable: str) -> SeriesKey:
        descriptor = self.get(source_id)
        unit = descriptor.unit_of(variable)
        if unit is None:
            raise UsageError(f"source {source_id!r} has no variable {variable!r}")
        return SeriesKey(
            source_id=source_id, station_id=station_id, variable=variable, unit=unit
        )
