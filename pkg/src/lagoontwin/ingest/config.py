"""JSON configuration for sources and schedules.

``sources.json``::

    {"sources": [
        {"source_id": "...",
         "adapter": "fixture" | "synthetic" | "http",
         "mapping": {"<source field>": {"variable": "...", "unit": "..."}},
         "decimal_comma": false,
         "descriptor": {... catalog document, optional ...},
         "stations": [{"station_id": ..., "name": ..., "latitude": ..., "longitude": ...}],
         ... adapter-specific keys ...}]}

``schedule.json``::

    {"entries": [{"source_id": "...", "cadence": "0 * * * *",
                  "kind": "window_refresh" | "weekly_compaction"}]}

Schemas are documented in docs/format.md.
"""

from __future__ import annotations

import json
from datetime import timedelta
from pathlib import Path

from lagoontwin.core.catalog import Catalog, _descriptor_from_doc
from lagoontwin.core.types import StationMeta
from lagoontwin.errors import UsageError
from lagoontwin.ingest.adapters import (
    FieldMapping,
    FixtureReplayAdapter,
    HttpPullAdapter,
    SourceAdapter,
)
from lagoontwin.ingest.scheduler import JobKind, ScheduleEntry
from lagoontwin.ingest.synthetic import SyntheticAdapter, SyntheticSpec, SyntheticVariable


def _mapping_from_doc(doc: dict) -> dict[str, FieldMapping]:
    return {
        field: FieldMapping(variable=entry["variable"], unit=entry["unit"])
        for field, entry in doc.items()
    }


def _stations_from_doc(source_id: str, docs: list[dict]) -> list[StationMeta]:
    return [
        StationMeta(
            station_id=s["station_id"],
            name=s.get("name", s["station_id"]),
            latitude=s["latitude"],
            longitude=s["longitude"],
            source_id=source_id,
        )
        for s in docs
    ]


def build_adapter(doc: dict, base_dir: Path) -> SourceAdapter:
    kind = doc.get("adapter")
    source_id = doc["source_id"]
    mapping = _mapping_from_doc(doc.get("mapping", {}))
    decimal_comma = bool(doc.get("decimal_comma", False))
    if kind == "fixture":
        return FixtureReplayAdapter(
            source_id=source_id,
            path=base_dir / doc["path"],
            mapping=mapping,
            speed=float(doc.get("speed", "inf")),
            decimal_comma=decimal_comma,
        )
    if kind == "http":
        return HttpPullAdapter(
            source_id=source_id,
            url_template=doc["url"],
            mapping=mapping,
            station_field=doc.get("station_field", "station"),
            timestamp_field=doc.get("timestamp_field", "timestamp"),
            records_path=doc.get("records_path", ""),
            decimal_comma=decimal_comma,
        )
    if kind == "synthetic":
        spec = SyntheticSpec(
            source_id=source_id,
            seed=int(doc["seed"]),
            variables=tuple(
                SyntheticVariable(
                    variable=v["variable"],
                    unit=v["unit"],
                    base=float(v["base"]),
                    daily_amplitude=float(v.get("daily_amplitude", 0.0)),
                    ar_coeff=float(v.get("ar_coeff", 0.0)),
                    noise_std=float(v.get("noise_std", 0.0)),
                    missing_prob=float(v.get("missing_prob", 0.0)),
                )
                for v in doc["variables"]
            ),
            stations=tuple(_stations_from_doc(source_id, doc.get("stations", []))),
            granularity=timedelta(seconds=int(doc.get("granularity_s", 3600))),
        )
        return SyntheticAdapter(spec)
    raise UsageError(f"unknown adapter kind {kind!r} for source {source_id!r}")


def load_sources(
    path: Path, catalog: Catalog
) -> dict[str, SourceAdapter]:
    """Build adapters and register descriptors/stations into the catalog."""
    doc = json.loads(Path(path).read_text())
    adapters: dict[str, SourceAdapter] = {}
    base_dir = Path(path).parent
    for source_doc in doc.get("sources", []):
        source_id = source_doc["source_id"]
        if "descriptor" in source_doc:
            catalog.register(_descriptor_from_doc(source_doc["descriptor"]))
        if "stations" in source_doc:
            catalog.register_stations(
                source_id, _stations_from_doc(source_id, source_doc["stations"])
            )
        adapters[source_id] = build_adapter(source_doc, base_dir)
    return adapters


def load_schedule(path: Path) -> list[ScheduleEntry]:
    doc = json.loads(Path(path).read_text())
    return [
        ScheduleEntry(
            source_id=entry["source_id"],
            cadence=entry["cadence"],
            kind=JobKind(entry["kind"]),
        )
        for entry in doc.get("entries", [])
    ]
