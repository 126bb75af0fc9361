"""Weekly compaction: move the week's window records into historical segments.

A compaction week is the half-open interval [week_ending - 7d, week_ending).
Every window record in that interval either lands in exactly one new segment
or is counted rejected with a reason (duplicate timestamp, pre-rejected
quality, or a validation rule). Re-running a week writes nothing new:
idempotence is keyed by (series, week) in the segment index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta

from lagoontwin.core import timeutil
from lagoontwin.core.catalog import Catalog
from lagoontwin.core.types import Observation, Quality, SeriesKey
from lagoontwin.errors import UsageError
from lagoontwin.store.historical import HistoricalStore
from lagoontwin.store.validation import ValidationRules
from lagoontwin.store.window import WindowStore

WEEK = timedelta(days=7)


@dataclass
class CompactionReport:
    moved: int = 0
    rejected: int = 0
    segments_written: int = 0
    rejection_reasons: dict[str, int] = field(default_factory=dict)

    def reject(self, reason: str) -> None:
        self.rejected += 1
        self.rejection_reasons[reason] = self.rejection_reasons.get(reason, 0) + 1


def week_key(week_ending: datetime) -> str:
    return timeutil.format_rfc3339(week_ending)


def _screen(
    records: list[Observation], rules: ValidationRules, report: CompactionReport
) -> list[Observation]:
    """First-wins dedup, then quality and rule checks; rejects are tallied."""
    accepted: list[Observation] = []
    seen: set[datetime] = set()
    for obs in records:
        if obs.timestamp in seen:
            report.reject("duplicate")
            continue
        seen.add(obs.timestamp)
        if obs.quality is Quality.REJECTED:
            report.reject("quality")
            continue
        reason = rules.check(obs, accepted[-1] if accepted else None)
        if reason is not None:
            report.reject(reason)
            continue
        accepted.append(obs)
    return accepted


def compact(
    window: WindowStore,
    hist: HistoricalStore,
    rules: ValidationRules,
    week_ending: datetime,
    catalog: Catalog,
    now: datetime | None = None,
) -> CompactionReport:
    week_ending = timeutil.as_utc_second(week_ending)
    now = timeutil.as_utc_second(now) if now else timeutil.utcnow()
    if week_ending > now:
        raise UsageError(f"week ending {week_ending} is in the future")
    week_start = week_ending - WEEK
    last_instant = week_ending - timedelta(seconds=1)
    week = week_key(week_ending)

    report = CompactionReport()
    pending: list[tuple[SeriesKey, list[Observation], list[Observation]]] = []
    for source, station, variable in window.list_series():
        series = catalog.series_key(source, station, variable)
        if hist.has_week(series, week):
            continue  # idempotent re-run: nothing counted, nothing written
        raw = window.read_raw(series, week_start, last_instant)
        if not raw:
            continue
        pending.append((series, raw, []))

    # precheck every series before writing anything, so a conflict anywhere
    # leaves the historical store untouched
    staged: list[tuple[SeriesKey, list[Observation]]] = []
    staged_report = CompactionReport()
    for series, raw, _ in pending:
        accepted = _screen(raw, rules, staged_report)
        if accepted:
            hist.check_overlap(
                series,
                timeutil.to_epoch(accepted[0].timestamp),
                timeutil.to_epoch(accepted[-1].timestamp),
            )
        staged.append((series, accepted))

    for series, accepted in staged:
        if not accepted:
            continue
        hist.write_segment(series, accepted, week)
        report.segments_written += 1
        report.moved += len(accepted)
    report.rejected = staged_report.rejected
    report.rejection_reasons = staged_report.rejection_reasons
    return report


def storage_report(window: WindowStore, hist: HistoricalStore) -> dict[str, int]:
    return {
        "window_bytes": window.size_bytes(),
        "hist_bytes": hist.size_bytes(),
        "records": window.record_count() + hist.record_count(),
    }
