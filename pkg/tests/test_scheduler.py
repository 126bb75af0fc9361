from __future__ import annotations

from datetime import timedelta

import pytest

from lagoontwin.errors import RetriableError, UsageError
from lagoontwin.ingest.adapters import FieldMapping, ScriptedAdapter, RawRecord
from lagoontwin.ingest.cron import CronExpr
from lagoontwin.ingest.pipeline import IngestPipeline, floor_week_ending
from lagoontwin.ingest.scheduler import (
    JobKind,
    ScheduleEntry,
    run_once,
    run_schedule,
    virtual_clock,
)
from lagoontwin.store.window import WindowStore

from .conftest import T0


def hourly(source="saih-catchments") -> ScheduleEntry:
    return ScheduleEntry(source, "0 * * * *", JobKind.WINDOW_REFRESH)


def test_cron_parse_and_match():
    cron = CronExpr.parse("0 * * * *")
    assert cron.matches(T0)
    assert not cron.matches(T0 + timedelta(minutes=30))
    every_15 = CronExpr.parse("*/15 * * * *")
    assert every_15.matches(T0 + timedelta(minutes=45))
    weekly = CronExpr.parse("0 0 * * 0")  # Sundays; T0 is a Saturday
    assert not weekly.matches(T0)
    assert weekly.matches(T0 + timedelta(days=1))


def test_cron_rejects_garbage():
    for bad in ("* * * *", "61 * * * *", "x * * * *", "*/0 * * * *"):
        with pytest.raises(UsageError):
            CronExpr.parse(bad)


def test_hourly_entry_three_executions():
    runs = []
    trace = run_schedule(
        [hourly()],
        virtual_clock(T0, timedelta(hours=3)),
        lambda entry, instant: runs.append(instant),
    )
    assert len(trace) == 3
    assert [t.instant for t in trace] == [T0 + timedelta(hours=h) for h in range(3)]
    assert all(t.ok for t in trace)


def test_simultaneous_sources_ordered_by_id():
    trace = run_schedule(
        [hourly("zeta"), hourly("alpha")],
        virtual_clock(T0, timedelta(hours=1)),
        lambda entry, instant: None,
    )
    assert [t.source_id for t in trace] == ["alpha", "zeta"]


def test_failure_does_not_block_other_sources():
    def runner(entry, instant):
        if entry.source_id == "alpha":
            raise RetriableError("boom")

    trace = run_schedule(
        [hourly("alpha"), hourly("beta")],
        virtual_clock(T0, timedelta(hours=1)),
        runner,
    )
    assert trace[0].outcome.startswith("failed")
    assert trace[1].ok


def test_trace_deterministic():
    def runner(entry, instant):
        if instant == T0:
            raise RetriableError("first tick fails")

    args = ([hourly()], lambda: virtual_clock(T0, timedelta(hours=2)), runner)
    t1 = run_schedule(args[0], args[1](), args[2])
    t2 = run_schedule(args[0], args[1](), args[2])
    assert t1 == t2


def test_one_compaction_entry_per_source():
    entries = [
        ScheduleEntry("a", "0 0 * * 0", JobKind.WEEKLY_COMPACTION),
        ScheduleEntry("a", "0 12 * * 0", JobKind.WEEKLY_COMPACTION),
    ]
    with pytest.raises(UsageError):
        run_once(entries, lambda e, i: None, now=T0)


def test_flaky_adapter_recovers_and_only_good_batch_lands(tmp_path, catalog):
    mapping = {"temp_sensor": FieldMapping(variable="temperature", unit="degC")}
    batch = [
        RawRecord("06A01", T0 + timedelta(minutes=30), "temp_sensor", "20.0"),
    ]
    adapter = ScriptedAdapter(
        source_id="saih-catchments",
        mapping=mapping,
        batches=[batch],
        failures_before_success=1,
    )
    window = WindowStore(tmp_path / "window")
    pipeline = IngestPipeline({"saih-catchments": adapter}, catalog, window)
    trace = run_schedule(
        [hourly()],
        virtual_clock(T0, timedelta(hours=2)),
        pipeline.run,
    )
    assert trace[0].outcome.startswith("failed")
    assert trace[1].ok
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    got = window.read_all(key)
    assert [o.value for o in got] == [20.0]
    # conservation: polled = accepted + rejected
    c = pipeline.counters
    assert c.polled == c.accepted + c.rejected + c.stale


def test_run_once_executes_every_entry():
    seen = []
    trace = run_once(
        [hourly("a"), hourly("b")], lambda e, i: seen.append(e.source_id), now=T0
    )
    assert seen == ["a", "b"]
    assert len(trace) == 2


def test_floor_week_ending_is_monday():
    # T0 (2024-06-01) is a Saturday; most recent Monday 00:00 is 2024-05-27
    end = floor_week_ending(T0)
    assert end.weekday() == 0
    assert end.isoformat() == "2024-05-27T00:00:00+00:00"
