from __future__ import annotations

from datetime import timedelta

import numpy as np
import pytest

from lagoontwin.core.timeutil import format_rfc3339
from lagoontwin.errors import UsageError
from lagoontwin.ingest.adapters import FieldMapping, FixtureReplayAdapter, HttpPullAdapter, RawRecord, ScriptedAdapter
from lagoontwin.ingest.normalize import poll_and_normalize
from lagoontwin.ingest.synthetic import SyntheticSpec, SyntheticVariable, synthesize

from .conftest import T0, make_key

MAPPING = {
    "temp_sensor": FieldMapping(variable="temperature", unit="degC"),
    "flow_sensor": FieldMapping(variable="streamflow", unit="m3/s"),
}


def raw(hours: float, field_name: str, value: str, station="06A01") -> RawRecord:
    return RawRecord(
        station_id=station,
        timestamp=T0 + timedelta(hours=hours),
        field_name=field_name,
        value=value,
    )


def test_known_and_unknown_fields(catalog):
    adapter = ScriptedAdapter(
        source_id="saih-catchments",
        mapping=MAPPING,
        batches=[[raw(1, "temp_sensor", "20.5"), raw(1, "flow_sensor", "0.3"),
                  raw(1, "mystery", "1.0")]],
    )
    observations, rejects = poll_and_normalize(
        adapter, T0, catalog, now=T0 + timedelta(hours=2)
    )
    assert len(observations) == 2
    assert {o.series.variable for o in observations} == {"temperature", "streamflow"}
    assert len(rejects) == 1
    assert rejects[0].reason == "unknown field"


def test_empty_poll(catalog):
    adapter = ScriptedAdapter(source_id="saih-catchments", mapping=MAPPING, batches=[[]])
    observations, rejects = poll_and_normalize(adapter, T0, catalog, now=T0)
    assert observations == [] and rejects == []


def test_decimal_comma_normalized(catalog):
    adapter = ScriptedAdapter(
        source_id="saih-catchments",
        mapping=MAPPING,
        batches=[[raw(1, "temp_sensor", "3,14")]],
        decimal_comma=True,
    )
    observations, _ = poll_and_normalize(adapter, T0, catalog, now=T0 + timedelta(hours=2))
    assert observations[0].value == pytest.approx(3.14)


def test_unparseable_value_rejected(catalog):
    adapter = ScriptedAdapter(
        source_id="saih-catchments",
        mapping=MAPPING,
        batches=[[raw(1, "temp_sensor", "n/a"), raw(1, "temp_sensor", "inf")]],
    )
    observations, rejects = poll_and_normalize(
        adapter, T0, catalog, now=T0 + timedelta(hours=2)
    )
    assert observations == []
    assert [r.reason for r in rejects] == ["unparseable value", "unparseable value"]


def test_values_never_fabricated(catalog):
    values = ["1.5", "2.25", "-0.75"]
    adapter = ScriptedAdapter(
        source_id="saih-catchments",
        mapping=MAPPING,
        batches=[[raw(1 + i, "temp_sensor", v) for i, v in enumerate(values)]],
    )
    observations, _ = poll_and_normalize(adapter, T0, catalog, now=T0 + timedelta(hours=5))
    assert [o.value for o in observations] == [float(v) for v in values]


def test_fixture_replay_batch_mode(tmp_path, catalog):
    fixture = tmp_path / "fixture" / "06A01"
    fixture.mkdir(parents=True)
    lines = [
        f"{format_rfc3339(T0 + timedelta(hours=h))}\t{v}\tmeasured"
        for h, v in [(1, 20.0), (2, 21.0), (3, 19.5)]
    ]
    (fixture / "temp_sensor.log").write_text("\n".join(lines) + "\n")
    adapter = FixtureReplayAdapter(
        source_id="saih-catchments", path=tmp_path / "fixture", mapping=MAPPING
    )
    records = adapter.poll(T0)
    assert len(records) == 3
    observations, rejects = poll_and_normalize(
        adapter, T0, catalog, now=T0 + timedelta(hours=4)
    )
    assert len(observations) == 3 and not rejects


def test_fixture_malformed_line_skipped(tmp_path, catalog):
    fixture = tmp_path / "fixture" / "06A01"
    fixture.mkdir(parents=True)
    good = f"{format_rfc3339(T0 + timedelta(hours=1))}\t20.0\tmeasured"
    (fixture / "temp_sensor.log").write_text(good + "\nthis is not a record\n")
    adapter = FixtureReplayAdapter(
        source_id="saih-catchments", path=tmp_path / "fixture", mapping=MAPPING
    )
    assert len(adapter.poll(T0)) == 1
    assert len(adapter.malformed) == 1


def test_empty_fixture_polls_empty(tmp_path):
    (tmp_path / "fixture").mkdir()
    adapter = FixtureReplayAdapter(
        source_id="saih-catchments", path=tmp_path / "fixture", mapping=MAPPING
    )
    assert adapter.poll(T0) == []
    assert adapter.poll(T0) == []


def test_fixture_speed_scales_replay(tmp_path):
    fixture = tmp_path / "fixture" / "06A01"
    fixture.mkdir(parents=True)
    lines = [
        f"{format_rfc3339(T0 + timedelta(hours=h))}\t1.0\tmeasured" for h in range(3)
    ]
    (fixture / "temp_sensor.log").write_text("\n".join(lines) + "\n")
    fake_time = iter([0.0, 0.0, 1800.0, 7200.0])
    adapter = FixtureReplayAdapter(
        source_id="saih-catchments",
        path=tmp_path / "fixture",
        mapping=MAPPING,
        speed=2.0,
        monotonic=lambda: next(fake_time),
    )
    before = T0 - timedelta(hours=1)
    assert len(adapter.poll(before)) == 1   # elapsed 0 -> only the first record
    assert len(adapter.poll(before)) == 2   # 1800s * 2 = 1h of fixture time
    assert len(adapter.poll(before)) == 3


def test_http_adapter_parses_payload(catalog):
    payload = b"""
    {"data": {"rows": [
        {"station": "06A01", "timestamp": "2024-06-01T01:00:00Z",
         "temp_sensor": "20,5", "ignored": 1},
        {"station": "06A01", "timestamp": "2024-06-01T02:00:00Z",
         "flow_sensor": 0.25}
    ]}}
    """
    adapter = HttpPullAdapter(
        source_id="saih-catchments",
        url_template="http://example.test/api?since={since}",
        mapping=MAPPING,
        records_path="data.rows",
        decimal_comma=True,
        fetch=lambda url: payload,
    )
    observations, rejects = poll_and_normalize(
        adapter, T0, catalog, now=T0 + timedelta(hours=3)
    )
    assert len(observations) == 2 and not rejects
    assert observations[0].value == pytest.approx(20.5)


def _station():
    from lagoontwin.core.types import StationMeta

    return StationMeta("S1", "Station 1", 37.7, -0.85, "synthetic-lagoon")


def test_synthesize_constant_series():
    spec = SyntheticSpec(
        source_id="synthetic-lagoon",
        seed=1,
        variables=(SyntheticVariable("temperature", "degC", 20.0, 0.0, 0.0, 0.0, 0.0),),
        stations=(_station(),),
        granularity=timedelta(hours=1),
    )
    out = synthesize(spec, T0, T0 + timedelta(hours=5))
    assert [o.value for o in out] == [20.0] * 5


def test_synthesize_deterministic_under_seed():
    spec = dict(
        source_id="synthetic-lagoon",
        seed=42,
        variables=(SyntheticVariable("temperature", "degC", 20.0, 3.0, 0.8, 1.0, 0.1),),
        stations=(_station(),),
        granularity=timedelta(hours=1),
    )
    a = synthesize(SyntheticSpec(**spec), T0, T0 + timedelta(days=4))
    b = synthesize(SyntheticSpec(**spec), T0, T0 + timedelta(days=4))
    assert [(o.timestamp, o.value) for o in a] == [(o.timestamp, o.value) for o in b]
    different = synthesize(
        SyntheticSpec(**{**spec, "seed": 43}), T0, T0 + timedelta(days=4)
    )
    assert [o.value for o in a] != [o.value for o in different]


def test_synthesize_ar1_autocorrelation():
    spec = SyntheticSpec(
        source_id="synthetic-lagoon",
        seed=7,
        variables=(SyntheticVariable("level", "m", 0.0, 0.0, 0.8, 1.0, 0.0),),
        stations=(_station(),),
        granularity=timedelta(hours=1),
    )
    out = synthesize(spec, T0, T0 + timedelta(hours=10_000))
    values = np.array([o.value for o in out])
    x, y = values[:-1], values[1:]
    r = np.corrcoef(x, y)[0, 1]
    assert 0.7 <= r <= 0.9


def test_synthesize_invalid_spec_rejected():
    with pytest.raises(UsageError):
        SyntheticVariable("x", "u", 0.0, 0.0, 1.0, 1.0)  # AR coeff not < 1
    with pytest.raises(UsageError):
        SyntheticVariable("x", "u", 0.0, 0.0, 0.5, 1.0, missing_prob=1.0)
