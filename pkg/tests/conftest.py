from __future__ import annotations

import sys
from datetime import datetime, timedelta

import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        sys.stderr.write(f"ACCEPTANCE {name}: {outcome}\n")

from lagoontwin.core.catalog import Catalog
from lagoontwin.core.timeutil import UTC
from lagoontwin.core.types import (
    DatasetDescriptor,
    Observation,
    Quality,
    SeriesKey,
    StationMeta,
)

T0 = datetime(2024, 6, 1, 0, 0, 0, tzinfo=UTC)


@pytest.fixture
def t0() -> datetime:
    return T0


def make_key(
    source="saih-catchments", station="06A01", variable="streamflow", unit="m3/s"
) -> SeriesKey:
    return SeriesKey(source_id=source, station_id=station, variable=variable, unit=unit)


def make_obs(key: SeriesKey, hours: float, value: float, quality=Quality.MEASURED):
    ts = T0 + timedelta(hours=hours)
    return Observation(series=key, timestamp=ts, value=value, quality=quality,
                       ingested_at=ts + timedelta(minutes=5))


@pytest.fixture
def catalog(tmp_path) -> Catalog:
    cat = Catalog(tmp_path / "data")
    cat.register(
        DatasetDescriptor(
            source_id="saih-catchments",
            field_area="Coastal, River Basin",
            start_date=datetime(2016, 1, 8, tzinfo=UTC),
            variables=(
                ("temperature", "degC"),
                ("streamflow", "m3/s"),
                ("level", "m"),
                ("rain", "mm"),
            ),
            native_granularity=timedelta(minutes=5),
            publish_schedule="0 * * * *",
            aggregation=(("rain", "sum"),),
        )
    )
    cat.register_stations(
        "saih-catchments",
        [
            StationMeta("06A01", "La Puebla", 37.7543, -0.8588, "saih-catchments"),
            StationMeta("06A18", "Desembocadura", 37.7100, -0.8500, "saih-catchments"),
        ],
    )
    return cat
