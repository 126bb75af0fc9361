"""UTC timestamp helpers.

Timestamps are timezone-aware UTC datetimes with second precision throughout
the platform; adapters convert at the boundary. Text form is RFC3339 with a
trailing ``Z``.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from lagoontwin.errors import UsageError

UTC = timezone.utc

SECOND = timedelta(seconds=1)
MINUTE = timedelta(minutes=1)
HOUR = timedelta(hours=1)
DAY = timedelta(days=1)
WEEK = timedelta(days=7)


def utcnow() -> datetime:
    return datetime.now(tz=UTC).replace(microsecond=0)


def as_utc_second(ts: datetime) -> datetime:
    """Normalize to UTC and truncate to whole seconds."""
    if ts.tzinfo is None:
        raise UsageError(f"naive datetime not allowed: {ts!r}")
    return ts.astimezone(UTC).replace(microsecond=0)


def to_epoch(ts: datetime) -> int:
    return int(as_utc_second(ts).timestamp())


def from_epoch(seconds: int) -> datetime:
    return datetime.fromtimestamp(seconds, tz=UTC)


def format_rfc3339(ts: datetime) -> str:
    return as_utc_second(ts).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_rfc3339(text: str) -> datetime:
    # Python 3.10 fromisoformat does not accept a 'Z' suffix.
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise UsageError(f"bad RFC3339 timestamp: {text!r}") from exc
    if ts.tzinfo is None:
        raise UsageError(f"timestamp lacks a UTC offset: {text!r}")
    return as_utc_second(ts)
