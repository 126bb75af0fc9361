"""Source adapters following the mediator-wrapper pattern.

An adapter polls one source and yields raw records with *source-native*
field names; the mediator (:func:`lagoontwin.ingest.normalize.poll_and_normalize`)
translates them into catalog-registered observations. Live institutions are
replaced by fixture replay and the synthetic generator; a single generic
HTTP puller covers API-style sources via configuration.
"""

from __future__ import annotations

import json
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Protocol

from lagoontwin.core import timeutil
from lagoontwin.errors import RetriableError, UsageError


@dataclass(frozen=True)
class RawRecord:
    """One source-native reading: the field name is untranslated."""

    station_id: str
    timestamp: datetime
    field_name: str
    value: str  # raw text; parsing happens in the mediator


@dataclass(frozen=True)
class FieldMapping:
    """How one source field becomes a catalog variable."""

    variable: str
    unit: str


class SourceAdapter(Protocol):
    source_id: str
    mapping: dict[str, FieldMapping]  # source field name -> variable
    decimal_comma: bool

    def poll(self, since: datetime) -> list[RawRecord]:
        """Read-only poll of records newer than ``since``."""
        ...


class FixtureReplayAdapter:
    """Replays a recorded fixture directory shaped like the window store
    (``<station>/<field>.log``, window-log line format).

    ``speed`` scales original inter-arrival times; ``speed=inf`` is batch
    mode where a single poll returns everything. Malformed lines become
    reject entries (surfaced via :attr:`malformed`) and replay continues.
    """

    def __init__(
        self,
        source_id: str,
        path: Path,
        mapping: dict[str, FieldMapping],
        speed: float = float("inf"),
        decimal_comma: bool = False,
        monotonic: Callable[[], float] | None = None,
    ):
        if speed <= 0:
            raise UsageError("replay speed must be positive")
        self.source_id = source_id
        self.mapping = dict(mapping)
        self.decimal_comma = decimal_comma
        self.speed = speed
        self._monotonic = monotonic
        self._started_at: float | None = None
        self.malformed: list[tuple[str, str]] = []  # (line, reason)
        self._records = self._load(Path(path))

    def _load(self, root: Path) -> list[RawRecord]:
        records: list[RawRecord] = []
        if not root.exists():
            raise UsageError(f"fixture path does not exist: {root}")
        for log in sorted(root.glob("*/*.log")):
            station = log.parent.name
            field_name = log.stem
            for line in log.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    self.malformed.append((line, "malformed line"))
                    continue
                try:
                    ts = timeutil.parse_rfc3339(parts[0])
                except UsageError:
                    self.malformed.append((line, "bad timestamp"))
                    continue
                records.append(
                    RawRecord(
                        station_id=station,
                        timestamp=ts,
                        field_name=field_name,
                        value=parts[1],
                    )
                )
        records.sort(key=lambda r: r.timestamp)
        return records

    def _elapsed(self) -> float:
        import time

        clock = self._monotonic or time.monotonic
        if self._started_at is None:
            self._started_at = clock()
        return clock() - self._started_at

    def poll(self, since: datetime) -> list[RawRecord]:
        available = self._records
        if self.speed != float("inf") and available:
            first = available[0].timestamp
            horizon = self._elapsed() * self.speed
            available = [
                r
                for r in available
                if (r.timestamp - first).total_seconds() <= horizon
            ]
        return [r for r in available if r.timestamp > since]


class HttpPullAdapter:
    """Generic HTTP puller for API-style sources.

    The URL template may contain ``{since}`` (RFC3339). The response must be
    JSON; ``records_path`` walks into it (dot-separated keys), yielding a
    list of flat objects carrying station, timestamp, and value fields.
    """

    def __init__(
        self,
        source_id: str,
        url_template: str,
        mapping: dict[str, FieldMapping],
        station_field: str = "station",
        timestamp_field: str = "timestamp",
        records_path: str = "",
        decimal_comma: bool = False,
        fetch: Callable[[str], bytes] | None = None,
    ):
        self.source_id = source_id
        self.url_template = url_template
        self.mapping = dict(mapping)
        self.station_field = station_field
        self.timestamp_field = timestamp_field
        self.records_path = records_path
        self.decimal_comma = decimal_comma
        self._fetch = fetch or self._default_fetch

    @staticmethod
    def _default_fetch(url: str) -> bytes:
        import httpx

        try:
            response = httpx.get(url, timeout=30.0)
            response.raise_for_status()
            return response.content
        except httpx.HTTPError as exc:
            raise RetriableError(f"HTTP pull failed: {exc}") from exc

    def poll(self, since: datetime) -> list[RawRecord]:
        url = self.url_template.format(since=timeutil.format_rfc3339(since))
        payload = self._fetch(url)
        try:
            doc = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise RetriableError(f"non-JSON payload from {url}") from exc
        for part in filter(None, self.records_path.split(".")):
            doc = doc.get(part, []) if isinstance(doc, dict) else []
        if not isinstance(doc, list):
            raise RetriableError(f"records path {self.records_path!r} not a list")
        records: list[RawRecord] = []
        for row in doc:
            if not isinstance(row, dict):
                continue
            station = str(row.get(self.station_field, ""))
            ts_text = str(row.get(self.timestamp_field, ""))
            try:
                ts = timeutil.parse_rfc3339(ts_text)
            except UsageError:
                continue
            if ts <= since:
                continue
            for field_name in self.mapping:
                if field_name in row:
                    records.append(
                        RawRecord(
                            station_id=station,
                            timestamp=ts,
                            field_name=field_name,
                            value=str(row[field_name]),
                        )
                    )
        records.sort(key=lambda r: r.timestamp)
        return records


@dataclass
class ScriptedAdapter:
    """Test helper: returns scripted batches, optionally failing first."""

    source_id: str
    mapping: dict[str, FieldMapping]
    batches: list[list[RawRecord]] = field(default_factory=list)
    failures_before_success: int = 0
    decimal_comma: bool = False
    _calls: int = 0

    def poll(self, since: datetime) -> list[RawRecord]:
        self._calls += 1
        if self._calls <= self.failures_before_success:
            raise RetriableError("scripted transport failure")
        index = self._calls - self.failures_before_success - 1
        if index < len(self.batches):
            return [r for r in self.batches[index] if r.timestamp > since]
        return []
