"""The mediator half of the mediator-wrapper pattern: turn raw source
records into catalog-registered observations.

Normalization never fabricates values — every accepted observation's value
is a parsed source field value. Unknown fields, unregistered variables, and
unparseable values land in the reject list with reasons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

from lagoontwin.core import timeutil
from lagoontwin.core.catalog import Catalog
from lagoontwin.core.types import Observation, Quality
from lagoontwin.errors import UsageError
from lagoontwin.ingest.adapters import RawRecord, SourceAdapter


@dataclass(frozen=True)
class Reject:
    record: RawRecord
    reason: str


def parse_value(raw: str, decimal_comma: bool) -> float:
    text = raw.strip()
    if decimal_comma:
        # sources using comma decimals don't use thousands separators
        text = text.replace(",", ".")
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {raw!r}")
    return value


def poll_and_normalize(
    adapter: SourceAdapter,
    since: datetime,
    catalog: Catalog,
    now: datetime | None = None,
) -> tuple[list[Observation], list[Reject]]:
    """Poll the adapter and translate. Transport failures propagate as
    RetriableError for the scheduler to record and retry next tick."""
    now = timeutil.as_utc_second(now) if now else timeutil.utcnow()
    if since > now:
        raise UsageError("since must not be in the future")

    raw_records = adapter.poll(since)
    observations: list[Observation] = []
    rejects: list[Reject] = []
    descriptor = catalog.get(adapter.source_id)
    for record in raw_records:
        mapping = adapter.mapping.get(record.field_name)
        if mapping is None:
            rejects.append(Reject(record, "unknown field"))
            continue
        registered_unit = descriptor.unit_of(mapping.variable)
        if registered_unit is None:
            rejects.append(Reject(record, "variable not in catalog"))
            continue
        if registered_unit != mapping.unit:
            rejects.append(Reject(record, "unit mismatch"))
            continue
        try:
            value = parse_value(record.value, adapter.decimal_comma)
        except ValueError:
            rejects.append(Reject(record, "unparseable value"))
            continue
        series = catalog.series_key(
            adapter.source_id, record.station_id, mapping.variable
        )
        observations.append(
            Observation(
                series=series,
                timestamp=record.timestamp,
                value=value,
                quality=Quality.MEASURED,
                ingested_at=max(now, record.timestamp),
            )
        )
    return observations, rejects
