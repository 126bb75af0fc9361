"""Columnar segment file: the on-disk unit of the historical store.

Layout (little-endian, documented in docs/format.md)::

    magic    "LGTW" (4 bytes)
    version  u16
    series   4 length-prefixed UTF-8 strings (source, station, variable, unit)
    count    u64
    columns  directory: 3 x (offset u64, length u64) for timestamps/values/quality
    ...      column payloads
    footer   CRC32 (u32) over all preceding bytes

Timestamps are signed 64-bit epoch seconds, delta-encoded as zigzag varints.
Values are raw IEEE754 doubles (bit-exact round trip, no lossy compression).
Quality is 1 byte per record. A CRC mismatch makes the whole segment
unreadable.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

from lagoontwin.core.types import Quality, SeriesKey
from lagoontwin.errors import IntegrityError, UsageError

MAGIC = b"LGTW"
VERSION = 1

_QUALITY_CODE = {Quality.MEASURED: 0, Quality.IMPUTED: 1}
_QUALITY_FROM_CODE = {0: Quality.MEASURED, 1: Quality.IMPUTED}


@dataclass(frozen=True)
class Record:
    """One decoded row: epoch seconds, value, quality."""

    epoch: int
    value: float
    quality: Quality


def _zigzag(n: int) -> int:
    return (n << 1) ^ (n >> 63)


def _unzigzag(n: int) -> int:
    return (n >> 1) ^ -(n & 1)


def _write_varint(out: bytearray, n: int) -> None:
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def _read_varint(data: bytes, pos: int) -> tuple[int, int]:
    shift = 0
    result = 0
    while True:
        if pos >= len(data):
            raise IntegrityError("truncated varint in timestamp column")
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7


def _pack_str(text: str) -> bytes:
    raw = text.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise UsageError("series key component too long")
    return struct.pack("<H", len(raw)) + raw


def _unpack_str(data: bytes, pos: int) -> tuple[str, int]:
    (length,) = struct.unpack_from("<H", data, pos)
    pos += 2
    return data[pos : pos + length].decode("utf-8"), pos + length


def encode(series: SeriesKey, records: list[Record]) -> bytes:
    """Serialize records (strictly increasing epochs) into one segment."""
    for r in records:
        if r.quality not in _QUALITY_CODE:
            raise UsageError("rejected records never enter historical storage")
    for a, b in zip(records, records[1:]):
        if b.epoch <= a.epoch:
            raise UsageError("segment records must be strictly increasing in time")

    ts_col = bytearray()
    prev = 0
    for r in records:
        _write_varint(ts_col, _zigzag(r.epoch - prev))
        prev = r.epoch
    value_col = struct.pack(f"<{len(records)}d", *(r.value for r in records))
    quality_col = bytes(_QUALITY_CODE[r.quality] for r in records)

    header = bytearray()
    header += MAGIC
    header += struct.pack("<H", VERSION)
    for part in (series.source_id, series.station_id, series.variable, series.unit):
        header += _pack_str(part)
    header += struct.pack("<Q", len(records))

    directory_size = 3 * 16
    base = len(header) + directory_size
    offsets = [base, base + len(ts_col), base + len(ts_col) + len(value_col)]
    lengths = [len(ts_col), len(value_col), len(quality_col)]
    for off, length in zip(offsets, lengths):
        header += struct.pack("<QQ", off, length)

    body = bytes(header) + bytes(ts_col) + value_col + quality_col
    return body + struct.pack("<I", zlib.crc32(body))


def decode(data: bytes) -> tuple[SeriesKey, list[Record]]:
    """Parse a segment; raises IntegrityError on any corruption."""
    if len(data) < len(MAGIC) + 2 + 4:
        raise IntegrityError("segment too short")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise IntegrityError("segment CRC mismatch")
    if body[:4] != MAGIC:
        raise IntegrityError("bad segment magic")
    (version,) = struct.unpack_from("<H", body, 4)
    if version != VERSION:
        raise IntegrityError(f"unsupported segment version {version}")
    pos = 6
    source, pos = _unpack_str(body, pos)
    station, pos = _unpack_str(body, pos)
    variable, pos = _unpack_str(body, pos)
    unit, pos = _unpack_str(body, pos)
    series = SeriesKey(source_id=source, station_id=station, variable=variable, unit=unit)
    (count,) = struct.unpack_from("<Q", body, pos)
    pos += 8
    directory = []
    for _ in range(3):
        directory.append(struct.unpack_from("<QQ", body, pos))
        pos += 16

    ts_off, ts_len = directory[0]
    val_off, val_len = directory[1]
    q_off, q_len = directory[2]
    if q_off + q_len > len(body) or val_len != 8 * count or q_len != count:
        raise IntegrityError("segment column directory inconsistent")

    epochs: list[int] = []
    p = ts_off
    prev = 0
    ts_end = ts_off + ts_len
    for _ in range(count):
        delta, p = _read_varint(body, p)
        prev += _unzigzag(delta)
        epochs.append(prev)
    if p != ts_end:
        raise IntegrityError("timestamp column length mismatch")

    values = struct.unpack_from(f"<{count}d", body, val_off)
    qualities = body[q_off : q_off + q_len]
    records = [
        Record(epoch=e, value=v, quality=_QUALITY_FROM_CODE[q])
        for e, v, q in zip(epochs, values, qualities)
    ]
    return series, records
