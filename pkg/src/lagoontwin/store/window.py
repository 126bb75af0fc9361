"""7-day window store for possibly-invalidated real-time data.

One append-only text log per series at ``<root>/<source>/<station>/<variable>.log``,
one record per line::

    <RFC3339 timestamp>\t<value>\t<quality>\n

Appends never read existing data (O(batch) I/O independent of store size);
duplicate (series, timestamp) records are therefore resolved at read time,
first-appended wins. The retention boundary is closed: a record exactly
seven days old survives a prune.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from lagoontwin.core import timeutil
from lagoontwin.core.types import Observation, Quality, SeriesKey
from lagoontwin.errors import UsageError

RETENTION = timedelta(days=7)


@dataclass(frozen=True)
class AppendResult:
    appended: int
    rejected: int  # older than the retention window at append time


def _format_line(obs: Observation) -> str:
    return (
        f"{timeutil.format_rfc3339(obs.timestamp)}\t"
        f"{obs.value!r}\t{obs.quality.value}\n"
    )


def parse_line(line: str, series: SeriesKey) -> Observation:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        raise UsageError(f"malformed window log line: {line!r}")
    ts = timeutil.parse_rfc3339(parts[0])
    value = float(parts[1])
    quality = Quality(parts[2])
    return Observation(series=series, timestamp=ts, value=value, quality=quality,
                       ingested_at=ts)


class WindowStore:
    """Append-optimized store holding the last seven days per series."""

    def __init__(self, root: Path, retention: timedelta = RETENTION):
        self.root = Path(root)
        self.retention = retention
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, series: SeriesKey) -> Path:
        return self.root / series.source_id / series.station_id / f"{series.variable}.log"

    def append(self, batch: list[Observation], now: datetime | None = None) -> AppendResult:
        """Append a batch. Records older than the retention window are
        skipped and tallied, not errors. Durable on return."""
        now = timeutil.as_utc_second(now) if now else timeutil.utcnow()
        cutoff = now - self.retention
        per_series: dict[SeriesKey, list[Observation]] = {}
        rejected = 0
        for obs in batch:
            if obs.timestamp < cutoff:
                rejected += 1
                continue
            per_series.setdefault(obs.series, []).append(obs)

        appended = 0
        for series, group in per_series.items():
            last = None
            for obs in group:
                if last is not None and obs.timestamp < last:
                    raise UsageError(f"batch for {series} not sorted by timestamp")
                last = obs.timestamp
            path = self._path(series)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8") as fh:
                fh.writelines(_format_line(o) for o in group)
                fh.flush()
                os.fsync(fh.fileno())
            appended += len(group)
        return AppendResult(appended=appended, rejected=rejected)

    def read(
        self, series: SeriesKey, start: datetime, end: datetime
    ) -> list[Observation]:
        """Records in [start, end], sorted, duplicates (same timestamp)
        collapsed to the first appended. Unknown series reads empty."""
        if start > end:
            raise UsageError("read range start must be <= end")
        path = self._path(series)
        if not path.exists():
            return []
        start = timeutil.as_utc_second(start)
        end = timeutil.as_utc_second(end)
        seen: dict[datetime, Observation] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obs = parse_line(line, series)
                if start <= obs.timestamp <= end and obs.timestamp not in seen:
                    seen[obs.timestamp] = obs
        return [seen[ts] for ts in sorted(seen)]

    def read_raw(
        self, series: SeriesKey, start: datetime, end: datetime
    ) -> list[Observation]:
        """Like :meth:`read` but keeps duplicate timestamps (append order
        preserved within a timestamp). Used by compaction for conservation
        accounting."""
        if start > end:
            raise UsageError("read range start must be <= end")
        path = self._path(series)
        if not path.exists():
            return []
        start = timeutil.as_utc_second(start)
        end = timeutil.as_utc_second(end)
        rows: list[Observation] = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obs = parse_line(line, series)
                if start <= obs.timestamp <= end:
                    rows.append(obs)
        rows.sort(key=lambda o: o.timestamp)  # sort is stable: append order kept
        return rows

    def read_all(self, series: SeriesKey) -> list[Observation]:
        return self.read(series, datetime.min.replace(tzinfo=timeutil.UTC),
                         datetime.max.replace(tzinfo=timeutil.UTC) - timedelta(days=1))

    def list_series(self) -> list[tuple[str, str, str]]:
        """(source_id, station_id, variable) triples present in the store."""
        out = []
        for log in self.root.glob("*/*/*.log"):
            variable = log.stem
            station = log.parent.name
            source = log.parent.parent.name
            out.append((source, station, variable))
        return sorted(out)

    def prune(self, now: datetime | None = None) -> int:
        """Drop records older than the retention window (closed boundary:
        exactly retention-old records survive). Returns dropped count."""
        now = timeutil.as_utc_second(now) if now else timeutil.utcnow()
        cutoff = now - self.retention
        dropped = 0
        for source, station, variable in self.list_series():
            path = self.root / source / station / f"{variable}.log"
            kept_lines: list[str] = []
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    ts = timeutil.parse_rfc3339(line.split("\t", 1)[0])
                    if ts >= cutoff:
                        kept_lines.append(line)
                    else:
                        dropped += 1
            tmp = path.with_suffix(".log.tmp")
            tmp.write_text("".join(kept_lines), encoding="utf-8")
            tmp.replace(path)
        return dropped

    def size_bytes(self) -> int:
        return sum(p.stat().st_size for p in self.root.glob("*/*/*.log"))

    def record_count(self) -> int:
        count = 0
        for path in self.root.glob("*/*/*.log"):
            with open(path, encoding="utf-8") as fh:
                count += sum(1 for line in fh if line.strip())
        return count
