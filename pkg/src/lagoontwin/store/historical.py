"""Compacted historical store: immutable columnar segments plus a JSON index.

Crash safety: a segment is written to a temp file, fsynced, renamed into
place, and only then recorded in the index (itself swapped atomically by
write-then-rename). A reader never observes a half-written segment.
Segments of one series never overlap in time.
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from lagoontwin.core import timeutil
from lagoontwin.core.types import Observation, SeriesKey
from lagoontwin.errors import ConflictError, IntegrityError, UsageError
from lagoontwin.store import columnar


@dataclass(frozen=True)
class SegmentInfo:
    source_id: str
    station_id: str
    variable: str
    unit: str
    start_epoch: int
    end_epoch: int  # inclusive
    count: int
    crc32: int
    week: str  # compaction week key (RFC3339 of the week's end instant)
    path: str  # relative to store root

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.source_id, self.station_id, self.variable)


class HistoricalStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.json"

    # -- index ---------------------------------------------------------------

    def _load_index(self) -> list[SegmentInfo]:
        if not self._index_path.exists():
            return []
        doc = json.loads(self._index_path.read_text())
        return [SegmentInfo(**entry) for entry in doc["segments"]]

    def _store_index(self, segments: list[SegmentInfo]) -> None:
        doc = {"segments": [vars(s) for s in segments]}
        tmp = self._index_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2) + "\n")
        tmp.replace(self._index_path)

    def segments(self, series: SeriesKey | None = None) -> list[SegmentInfo]:
        index = self._load_index()
        if series is not None:
            index = [s for s in index if s.triple == series.triple]
        return sorted(index, key=lambda s: (s.triple, s.start_epoch))

    def has_week(self, series: SeriesKey, week: str) -> bool:
        return any(s.week == week for s in self.segments(series))

    # -- write ---------------------------------------------------------------

    def check_overlap(self, series: SeriesKey, start_epoch: int, end_epoch: int) -> None:
        for seg in self.segments(series):
            if start_epoch <= seg.end_epoch and seg.start_epoch <= end_epoch:
                raise ConflictError(
                    f"range [{start_epoch}, {end_epoch}] overlaps segment "
                    f"{seg.path} of {series}"
                )

    def write_segment(
        self, series: SeriesKey, observations: list[Observation], week: str
    ) -> SegmentInfo:
        """Write one immutable segment; observations must be sorted, strictly
        increasing, validated (no rejected quality)."""
        if not observations:
            raise UsageError("cannot write an empty segment")
        records = [
            columnar.Record(
                epoch=timeutil.to_epoch(o.timestamp), value=o.value, quality=o.quality
            )
            for o in observations
        ]
        start, end = records[0].epoch, records[-1].epoch
        self.check_overlap(series, start, end)

        data = columnar.encode(series, records)
        rel = Path(series.source_id) / series.station_id / series.variable
        (self.root / rel).mkdir(parents=True, exist_ok=True)
        rel_path = rel / f"{start}-{end}.seg"
        final = self.root / rel_path
        tmp = final.with_suffix(".seg.tmp")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        tmp.replace(final)

        info = SegmentInfo(
            source_id=series.source_id,
            station_id=series.station_id,
            variable=series.variable,
            unit=series.unit,
            start_epoch=start,
            end_epoch=end,
            count=len(records),
            crc32=zlib.crc32(data),
            week=week,
            path=str(rel_path),
        )
        index = self._load_index()
        index.append(info)
        self._store_index(index)
        return info

    # -- read ----------------------------------------------------------------

    def read(self, series: SeriesKey, start: datetime, end: datetime) -> list[Observation]:
        """Sorted union across overlapping segments; checksums verified."""
        if start > end:
            raise UsageError("read range start must be <= end")
        start_epoch = timeutil.to_epoch(start)
        end_epoch = timeutil.to_epoch(end)
        out: list[Observation] = []
        for seg in self.segments(series):
            if seg.end_epoch < start_epoch or seg.start_epoch > end_epoch:
                continue
            data = (self.root / seg.path).read_bytes()
            try:
                stored_series, records = columnar.decode(data)
            except IntegrityError as exc:
                raise IntegrityError(f"segment {seg.path}: {exc}") from exc
            for record in records:
                if start_epoch <= record.epoch <= end_epoch:
                    out.append(
                        Observation(
                            series=stored_series,
                            timestamp=timeutil.from_epoch(record.epoch),
                            value=record.value,
                            quality=record.quality,
                            ingested_at=timeutil.from_epoch(record.epoch),
                        )
                    )
        out.sort(key=lambda o: o.timestamp)
        return out

    def size_bytes(self) -> int:
        return sum(
            (self.root / seg.path).stat().st_size for seg in self.segments()
        )

    def record_count(self) -> int:
        return sum(seg.count for seg in self.segments())
