"""In-process cron-style scheduler driving the ingest jobs.

The scheduler is a single loop over an injectable clock (virtual for tests
and replays, real for ``ingest --follow``), which makes every run fully
deterministic given the same entries, clock script, and adapter behavior.
Entries due at the same instant execute in source_id order; a failure is a
trace entry, never a stop.
"""

from __future__ import annotations

import time
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum

from lagoontwin.core import timeutil
from lagoontwin.errors import UsageError
from lagoontwin.ingest.cron import CronExpr


class JobKind(str, Enum):
    WINDOW_REFRESH = "window_refresh"
    WEEKLY_COMPACTION = "weekly_compaction"


@dataclass(frozen=True)
class ScheduleEntry:
    source_id: str
    cadence: str  # cron-style
    kind: JobKind

    def __post_init__(self) -> None:
        CronExpr.parse(self.cadence)  # must parse

    @property
    def cron(self) -> CronExpr:
        return CronExpr.parse(self.cadence)


@dataclass(frozen=True)
class TraceEvent:
    instant: datetime
    source_id: str
    kind: JobKind
    outcome: str  # "ok" or "failed: <reason>"

    @property
    def ok(self) -> bool:
        return self.outcome == "ok"


def validate_entries(entries: Iterable[ScheduleEntry]) -> list[ScheduleEntry]:
    entries = list(entries)
    compactions: set[str] = set()
    for entry in entries:
        if entry.kind is JobKind.WEEKLY_COMPACTION:
            if entry.source_id in compactions:
                raise UsageError(
                    f"more than one weekly_compaction entry for {entry.source_id!r}"
                )
            compactions.add(entry.source_id)
    return entries


def virtual_clock(
    start: datetime, duration: timedelta, step: timedelta = timedelta(minutes=1)
) -> Iterator[datetime]:
    """Minute ticks over [start, start+duration)."""
    tick = timeutil.as_utc_second(start)
    end = tick + duration
    while tick < end:
        yield tick
        tick += step


def real_clock(step: timedelta = timedelta(minutes=1)) -> Iterator[datetime]:
    while True:
        now = timeutil.utcnow()
        yield now.replace(second=0)
        time.sleep(step.total_seconds())


Runner = Callable[[ScheduleEntry, datetime], None]


def run_schedule(
    entries: Iterable[ScheduleEntry],
    clock: Iterable[datetime],
    runner: Runner,
    tick_budget: int | None = None,
) -> list[TraceEvent]:
    """Execute each due entry once per due instant; failures do not block
    other sources. Returns the execution trace."""
    entries = validate_entries(entries)
    crons = [(entry, entry.cron) for entry in entries]
    trace: list[TraceEvent] = []
    ticks = 0
    for instant in clock:
        if tick_budget is not None and ticks >= tick_budget:
            break
        ticks += 1
        due = sorted(
            (entry for entry, cron in crons if cron.matches(instant)),
            key=lambda e: (e.source_id, e.kind.value),
        )
        for entry in due:
            try:
                runner(entry, instant)
                outcome = "ok"
            except Exception as exc:  # a failed run must not block others
                outcome = f"failed: {exc}"
            trace.append(TraceEvent(instant, entry.source_id, entry.kind, outcome))
    return trace


def run_once(
    entries: Iterable[ScheduleEntry], runner: Runner, now: datetime | None = None
) -> list[TraceEvent]:
    """Execute every entry a single time, ignoring cadence (CLI --once)."""
    now = timeutil.as_utc_second(now) if now else timeutil.utcnow()
    trace: list[TraceEvent] = []
    for entry in sorted(
        validate_entries(entries), key=lambda e: (e.source_id, e.kind.value)
    ):
        try:
            runner(entry, now)
            outcome = "ok"
        except Exception as exc:
            outcome = f"failed: {exc}"
        trace.append(TraceEvent(now, entry.source_id, entry.kind, outcome))
    return trace
