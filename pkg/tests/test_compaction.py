from __future__ import annotations

from datetime import timedelta

import pytest

from lagoontwin.errors import UsageError
from lagoontwin.store.compaction import compact, storage_report, week_key
from lagoontwin.store.historical import HistoricalStore
from lagoontwin.store.validation import ValidationRules, VariableRule
from lagoontwin.store.window import WindowStore

from .conftest import T0, make_obs

WEEK_END = T0 + timedelta(days=7)


@pytest.fixture
def stores(tmp_path):
    return WindowStore(tmp_path / "window"), HistoricalStore(tmp_path / "hist")


def lenient_rules() -> ValidationRules:
    return ValidationRules({})


def test_all_valid_records_move(stores, catalog):
    window, hist = stores
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    window.append([make_obs(key, float(h), 20.0) for h in range(10)],
                  now=WEEK_END)
    report = compact(window, hist, lenient_rules(), WEEK_END, catalog, now=WEEK_END)
    assert report.moved == 10
    assert report.rejected == 0
    assert report.segments_written == 1
    got = hist.read(key, T0, WEEK_END)
    assert len(got) == 10


def test_rerun_is_idempotent(stores, catalog):
    window, hist = stores
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    window.append([make_obs(key, 1.0, 20.0)], now=WEEK_END)
    first = compact(window, hist, lenient_rules(), WEEK_END, catalog, now=WEEK_END)
    assert first.moved == 1
    again = compact(window, hist, lenient_rules(), WEEK_END, catalog, now=WEEK_END)
    assert again.moved == 0
    assert again.segments_written == 0


def test_range_violation_rejected_with_reason(stores, catalog):
    window, hist = stores
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    rules = ValidationRules({"temperature": VariableRule(min_value=-10, max_value=50)})
    window.append(
        [make_obs(key, 1.0, 20.0), make_obs(key, 2.0, 999.0), make_obs(key, 3.0, 21.0)],
        now=WEEK_END,
    )
    report = compact(window, hist, rules, WEEK_END, catalog, now=WEEK_END)
    assert report.moved == 2
    assert report.rejected == 1
    assert report.rejection_reasons == {"range": 1}


def test_step_rule_uses_previous_accepted(stores, catalog):
    window, hist = stores
    key = catalog.series_key("saih-catchments", "06A01", "level")
    rules = ValidationRules({"level": VariableRule(max_step=5.0)})
    window.append(
        [make_obs(key, 1.0, 1.0), make_obs(key, 2.0, 20.0), make_obs(key, 3.0, 2.0)],
        now=WEEK_END,
    )
    report = compact(window, hist, rules, WEEK_END, catalog, now=WEEK_END)
    # 20.0 jumps >5 from 1.0 -> rejected; 2.0 is compared against 1.0, passes
    assert report.moved == 2
    assert report.rejection_reasons == {"step": 1}


def test_duplicates_counted_rejected(stores, catalog):
    window, hist = stores
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    window.append([make_obs(key, 1.0, 20.0)], now=WEEK_END)
    window.append([make_obs(key, 1.0, 22.0)], now=WEEK_END)
    report = compact(window, hist, lenient_rules(), WEEK_END, catalog, now=WEEK_END)
    assert report.moved == 1
    assert report.rejection_reasons == {"duplicate": 1}
    # conservation: moved + rejected = raw records in the week
    assert report.moved + report.rejected == 2


def test_only_week_range_compacted(stores, catalog):
    window, hist = stores
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    inside = make_obs(key, 1.0, 20.0)
    at_boundary = make_obs(key, 24.0 * 7, 21.0)  # exactly week_ending: next week
    window.append([inside, at_boundary], now=WEEK_END)
    report = compact(window, hist, lenient_rules(), WEEK_END, catalog, now=WEEK_END)
    assert report.moved == 1


def test_future_week_rejected(stores, catalog):
    window, hist = stores
    with pytest.raises(UsageError):
        compact(window, hist, lenient_rules(), WEEK_END, catalog, now=T0)


def test_storage_report_counts(stores, catalog):
    window, hist = stores
    assert storage_report(window, hist) == {
        "window_bytes": 0, "hist_bytes": 0, "records": 0
    }
    key = catalog.series_key("saih-catchments", "06A01", "temperature")
    window.append([make_obs(key, float(h), 20.0) for h in range(5)], now=WEEK_END)
    report = storage_report(window, hist)
    assert report["records"] == 5
    assert report["window_bytes"] > 0


def test_week_key_is_stable():
    assert week_key(WEEK_END) == "2024-06-08T00:00:00Z"
