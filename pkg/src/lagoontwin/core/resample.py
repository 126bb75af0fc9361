"""Bucket resampling used to align mixed-granularity series before modeling.

Buckets are half-open intervals aligned to the Unix epoch. Empty buckets are
absent from the output, never zero-filled. Output points sit at the bucket
start.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from datetime import timedelta

from lagoontwin.core import timeutil
from lagoontwin.core.types import Aggregation, Observation, Quality
from lagoontwin.errors import UsageError


def _aggregate(values: Sequence[float], aggregation: Aggregation) -> float:
    if aggregation is Aggregation.MEAN:
        return sum(values) / len(values)
    if aggregation is Aggregation.SUM:
        return sum(values)
    return values[-1]  # LAST


def resample(
    observations: Iterable[Observation],
    target_granularity: timedelta,
    aggregation: Aggregation,
) -> list[Observation]:
    """Aggregate sorted observations of one series into aligned buckets."""
    obs = list(observations)
    if not obs:
        return []
    step = int(target_granularity.total_seconds())
    if step <= 0:
        raise UsageError("target_granularity must be positive")

    epochs = [timeutil.to_epoch(o.timestamp) for o in obs]
    if any(b < a for a, b in zip(epochs, epochs[1:])):
        raise UsageError("input must be sorted by timestamp")

    out: list[Observation] = []
    bucket_start: int | None = None
    bucket: list[Observation] = []

    def flush() -> None:
        if not bucket:
            return
        value = _aggregate([o.value for o in bucket], aggregation)
        quality = (
            Quality.MEASURED
            if all(o.quality is Quality.MEASURED for o in bucket)
            else Quality.IMPUTED
        )
        out.append(
            Observation(
                series=bucket[0].series,
                timestamp=timeutil.from_epoch(bucket_start),
                value=value,
                quality=quality,
                ingested_at=max(o.ingested_at for o in bucket),
            )
        )

    for o, epoch in zip(obs, epochs):
        start = (epoch // step) * step
        if start != bucket_start:
            flush()
            bucket_start = start
            bucket = []
        bucket.append(o)
    flush()
    return out
