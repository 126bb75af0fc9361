from lagoontwin.core.types import (
    Aggregation,
    DatasetDescriptor,
    MetricReport,
    Observation,
    Quality,
    SeriesKey,
    StationMeta,
)

__all__ = [
    "Aggregation",
    "DatasetDescriptor",
    "MetricReport",
    "Observation",
    "Quality",
    "SeriesKey",
    "StationMeta",
]
