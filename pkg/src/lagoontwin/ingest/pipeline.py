"""Glue between scheduler entries and the stores: poll, normalize, append.

Conservation holds across any run: records_polled = accepted + rejected and
accepted = records appended to the window store (the window append itself
may additionally reject stale records into its own tally).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta

from lagoontwin.core import timeutil
from lagoontwin.core.catalog import Catalog
from lagoontwin.errors import UsageError
from lagoontwin.ingest.adapters import SourceAdapter
from lagoontwin.ingest.normalize import Reject, poll_and_normalize
from lagoontwin.ingest.scheduler import JobKind, ScheduleEntry
from lagoontwin.store.compaction import compact
from lagoontwin.store.historical import HistoricalStore
from lagoontwin.store.validation import ValidationRules
from lagoontwin.store.window import WindowStore


@dataclass
class PipelineCounters:
    polled: int = 0
    accepted: int = 0
    rejected: int = 0
    stale: int = 0
    rejects: list[Reject] = field(default_factory=list)


class IngestPipeline:
    """Runs scheduler jobs against the stores for a set of adapters."""

    def __init__(
        self,
        adapters: dict[str, SourceAdapter],
        catalog: Catalog,
        window: WindowStore,
        hist: HistoricalStore | None = None,
        rules: ValidationRules | None = None,
    ):
        self.adapters = dict(adapters)
        self.catalog = catalog
        self.window = window
        self.hist = hist
        self.rules = rules or ValidationRules.default()
        self.counters = PipelineCounters()
        self._since: dict[str, datetime] = {}

    def _since_for(self, source_id: str, now: datetime) -> datetime:
        return self._since.get(source_id, now - self.window.retention)

    def run(self, entry: ScheduleEntry, now: datetime) -> None:
        if entry.kind is JobKind.WINDOW_REFRESH:
            self.refresh(entry.source_id, now)
        elif entry.kind is JobKind.WEEKLY_COMPACTION:
            self.compact_week(now)
        else:  # pragma: no cover - enum is closed
            raise UsageError(f"unknown job kind {entry.kind}")

    def refresh(self, source_id: str, now: datetime) -> None:
        adapter = self.adapters.get(source_id)
        if adapter is None:
            raise UsageError(f"no adapter configured for {source_id!r}")
        since = self._since_for(source_id, now)
        observations, rejects = poll_and_normalize(adapter, since, self.catalog, now=now)
        result = self.window.append(observations, now=now)
        self.counters.polled += len(observations) + len(rejects)
        self.counters.accepted += result.appended
        self.counters.rejected += len(rejects)
        self.counters.stale += result.rejected
        self.counters.rejects.extend(rejects)
        if observations:
            self._since[source_id] = max(o.timestamp for o in observations)
        else:
            self._since[source_id] = now

    def compact_week(self, now: datetime) -> None:
        if self.hist is None:
            raise UsageError("pipeline has no historical store configured")
        week_ending = floor_week_ending(now)
        compact(self.window, self.hist, self.rules, week_ending, self.catalog, now=now)
        self.window.prune(now=now)


def floor_week_ending(now: datetime) -> datetime:
    """Most recent Monday 00:00 UTC at or before ``now`` (end of the ISO
    week that finished last)."""
    now = timeutil.as_utc_second(now)
    midnight = now.replace(hour=0, minute=0, second=0)
    return midnight - timedelta(days=now.weekday())
