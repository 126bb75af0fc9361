from __future__ import annotations

import struct

import numpy as np
import pytest

from lagoontwin.core.types import Quality
from lagoontwin.errors import IntegrityError, UsageError
from lagoontwin.store import columnar

from .conftest import make_key


def random_records(rng: np.random.Generator, n: int) -> list[columnar.Record]:
    epochs = np.cumsum(rng.integers(1, 4000, size=n)) + 1_500_000_000
    values = rng.standard_normal(n) * rng.choice([1e-8, 1.0, 1e8], size=n)
    qualities = rng.random(n) < 0.1
    return [
        columnar.Record(
            epoch=int(e),
            value=float(v),
            quality=Quality.IMPUTED if q else Quality.MEASURED,
        )
        for e, v, q in zip(epochs, values, qualities)
    ]


def test_round_trip_bit_exact():
    rng = np.random.default_rng(3)
    key = make_key()
    records = random_records(rng, 500)
    series, decoded = columnar.decode(columnar.encode(key, records))
    assert series == key
    assert series.unit == key.unit
    assert decoded == records
    # bit-exactness of floats, including negative zero
    for a, b in zip(records, decoded):
        assert struct.pack("<d", a.value) == struct.pack("<d", b.value)


def test_negative_zero_and_extremes_round_trip():
    key = make_key()
    values = [-0.0, 5e-324, 1.7976931348623157e308, -1.7976931348623157e308]
    records = [
        columnar.Record(epoch=1000 + i, value=v, quality=Quality.MEASURED)
        for i, v in enumerate(values)
    ]
    _, decoded = columnar.decode(columnar.encode(key, records))
    for a, b in zip(records, decoded):
        assert struct.pack("<d", a.value) == struct.pack("<d", b.value)


def test_empty_segment_round_trip():
    key = make_key()
    _, decoded = columnar.decode(columnar.encode(key, []))
    assert decoded == []


def test_rejected_quality_refused():
    key = make_key()
    with pytest.raises(UsageError):
        columnar.encode(key, [columnar.Record(0, 1.0, Quality.REJECTED)])


def test_non_increasing_epochs_refused():
    key = make_key()
    records = [
        columnar.Record(10, 1.0, Quality.MEASURED),
        columnar.Record(10, 2.0, Quality.MEASURED),
    ]
    with pytest.raises(UsageError):
        columnar.encode(key, records)


def test_single_byte_corruption_detected():
    rng = np.random.default_rng(5)
    key = make_key()
    data = bytearray(columnar.encode(key, random_records(rng, 64)))
    for pos in range(0, len(data), 7):
        corrupted = bytearray(data)
        corrupted[pos] ^= 0x40
        with pytest.raises(IntegrityError):
            columnar.decode(bytes(corrupted))


def test_truncation_detected():
    key = make_key()
    data = columnar.encode(key, [columnar.Record(1, 1.0, Quality.MEASURED)])
    with pytest.raises(IntegrityError):
        columnar.decode(data[:-1])
    with pytest.raises(IntegrityError):
        columnar.decode(b"")
