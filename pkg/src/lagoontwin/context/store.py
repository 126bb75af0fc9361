"""In-process context entity store with temporal attribute history.

Replaces the external broker/temporal-database stack with a dict plus JSON
snapshot persistence (one document per entity under ``<root>/context/``).
Single writer, snapshot readers. Geo filtering is a linear haversine scan;
entity counts here are hundreds, not millions.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any

from lagoontwin.core import timeutil
from lagoontwin.core.types import Observation, SeriesKey, StationMeta
from lagoontwin.errors import UsageError
from lagoontwin.context.entities import ContextEntity, make_urn
from lagoontwin.context.geo import haversine_m


@dataclass(frozen=True)
class TimedValue:
    observed_at: datetime
    value: Any


class ContextStore:
    def __init__(self, root: Path | None = None):
        self._root = Path(root) / "context" if root is not None else None
        self._entities: dict[str, ContextEntity] = {}
        self._versions: dict[str, int] = {}
        self._temporal: dict[tuple[str, str], list[TimedValue]] = {}
        if self._root is not None:
            self._load()

    # -- persistence -----------------------------------------------------

    def _entity_path(self, entity_id: str) -> Path:
        assert self._root is not None
        safe = entity_id.replace(":", "_")
        return self._root / f"{safe}.json"

    def _load(self) -> None:
        if self._root is None or not self._root.is_dir():
            return
        for path in sorted(self._root.glob("*.json")):
            doc = json.loads(path.read_text())
            entity = ContextEntity.from_key_values(doc["entity"])
            self._entities[entity.id] = entity
            self._versions[entity.id] = doc.get("version", 1)
            for attr, points in doc.get("temporal", {}).items():
                self._temporal[(entity.id, attr)] = [
                    TimedValue(timeutil.parse_rfc3339(p["observed_at"]), p["value"])
                    for p in points
                ]

    def _save(self, entity_id: str) -> None:
        if self._root is None:
            return
        self._root.mkdir(parents=True, exist_ok=True)
        entity = self._entities[entity_id]
        temporal = {
            attr: [
                {"observed_at": timeutil.format_rfc3339(p.observed_at), "value": p.value}
                for p in points
            ]
            for (eid, attr), points in self._temporal.items()
            if eid == entity_id
        }
        doc = {
            "entity": entity.key_values(),
            "version": self._versions[entity_id],
            "temporal": temporal,
        }
        path = self._entity_path(entity_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2) + "\n")
        tmp.replace(path)

    # -- writes ------------------------------------------------------------

    def upsert(self, entity: ContextEntity, observed_at: datetime | None = None) -> int:
        """Replace current state. Identical content is a no-op; otherwise the
        version increments and every changed attribute gains one temporal
        point stamped with the update instant."""
        observed_at = (
            timeutil.as_utc_second(observed_at) if observed_at else timeutil.utcnow()
        )
        current = self._entities.get(entity.id)
        if current == entity:
            return self._versions[entity.id]
        changed: list[tuple[str, Any]] = []
        old_props = current.properties if current else {}
        for name, value in entity.properties.items():
            if old_props.get(name) != value:
                changed.append((name, value))
        if (current.location if current else None) != entity.location:
            changed.append(("location", list(entity.location or ())))
        self._entities[entity.id] = entity
        self._versions[entity.id] = self._versions.get(entity.id, 0) + 1
        for name, value in changed:
            self._append_temporal(entity.id, name, observed_at, value)
        self._save(entity.id)
        return self._versions[entity.id]

    def _append_temporal(
        self, entity_id: str, attribute: str, observed_at: datetime, value: Any
    ) -> None:
        points = self._temporal.setdefault((entity_id, attribute), [])
        keys = [p.observed_at for p in points]
        pos = bisect.bisect_left(keys, observed_at)
        if pos < len(points) and points[pos].observed_at == observed_at:
            return  # duplicate instant: keep first, sequence stays strictly sorted
        points.insert(pos, TimedValue(observed_at, value))

    def append_temporal(
        self, entity_id: str, attribute: str, observed_at: datetime, value: Any
    ) -> None:
        if entity_id not in self._entities:
            raise UsageError(f"unknown entity {entity_id!r}")
        self._append_temporal(
            entity_id, attribute, timeutil.as_utc_second(observed_at), value
        )
        self._save(entity_id)

    # -- reads --------------------------------------------------------------

    def get(self, entity_id: str) -> ContextEntity | None:
        return self._entities.get(entity_id)

    def version(self, entity_id: str) -> int:
        return self._versions.get(entity_id, 0)

    def query(
        self,
        entity_type: str | None = None,
        near: tuple[tuple[float, float], float] | None = None,
    ) -> list[ContextEntity]:
        """All and only entities matching every supplied clause, sorted by id.
        ``near`` is ((lat, lon), max_distance_m) using haversine distance."""
        if near is not None and near[1] < 0:
            raise UsageError("max distance must be nonnegative")
        out = []
        for entity in self._entities.values():
            if entity_type is not None and entity.type != entity_type:
                continue
            if near is not None:
                point, max_distance = near
                if entity.location is None:
                    continue
                if haversine_m(point, entity.location) > max_distance:
                    continue
            out.append(entity)
        return sorted(out, key=lambda e: e.id)

    def temporal(
        self, entity_id: str, attribute: str, start: datetime, end: datetime
    ) -> list[TimedValue]:
        """Sorted subsequence within [start, end]; unknown ids read empty."""
        if start > end:
            raise UsageError("temporal range start must be <= end")
        start = timeutil.as_utc_second(start)
        end = timeutil.as_utc_second(end)
        points = self._temporal.get((entity_id, attribute), [])
        return [p for p in points if start <= p.observed_at <= end]

    def lint_dangling(self) -> list[tuple[str, str, str]]:
        """(entity, relationship, target) triples whose target is missing."""
        out = []
        for entity in self._entities.values():
            for name, targets in entity.relationships.items():
                for target in targets:
                    if target not in self._entities:
                        out.append((entity.id, name, target))
        return sorted(out)

    # -- observation wrapping ------------------------------------------------

    def wrap_observations(
        self, series: SeriesKey, station: StationMeta, batch: list[Observation]
    ) -> str:
        """Ensure a Device entity for the station and append each observation
        as a temporal point on the matching controlled property. Returns the
        device URN."""
        device_id = make_urn("Device", f"{series.source_id}-{station.station_id}")
        current = self._entities.get(device_id)
        controlled = set(current.properties.get("controlledProperty", [])) if current else set()
        controlled.add(series.variable)
        last_reported = (
            timeutil.parse_rfc3339(current.properties["dateLastValueReported"])
            if current and "dateLastValueReported" in current.properties
            else None
        )
        if batch:
            newest = max(o.timestamp for o in batch)
            if last_reported is None or newest > last_reported:
                last_reported = newest
        properties: dict[str, Any] = {
            "name": f"Device for {station.name}",
            "deviceCategory": "sensor",
            "areaServed": "Mar Menor",
            "controlledProperty": sorted(controlled),
        }
        if last_reported is not None:
            properties["dateLastValueReported"] = timeutil.format_rfc3339(last_reported)
        entity = ContextEntity(
            id=device_id,
            type="Device",
            properties=properties,
            relationships=current.relationships if current else {},
            location=(station.latitude, station.longitude),
        )
        self.upsert(entity, observed_at=last_reported)
        for obs in batch:
            self._append_temporal(device_id, series.variable, obs.timestamp, obs.value)
        if batch:
            self._save(device_id)
        return device_id
