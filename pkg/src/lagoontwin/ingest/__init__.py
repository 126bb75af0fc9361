from lagoontwin.ingest.adapters import (
    FieldMapping,
    FixtureReplayAdapter,
    HttpPullAdapter,
    RawRecord,
    SourceAdapter,
)
from lagoontwin.ingest.normalize import Reject, poll_and_normalize
from lagoontwin.ingest.pipeline import IngestPipeline
from lagoontwin.ingest.scheduler import (
    JobKind,
    ScheduleEntry,
    TraceEvent,
    run_once,
    run_schedule,
    virtual_clock,
)
from lagoontwin.ingest.synthetic import (
    SyntheticAdapter,
    SyntheticSpec,
    SyntheticVariable,
    synthesize,
)

__all__ = [
    "FieldMapping",
    "FixtureReplayAdapter",
    "HttpPullAdapter",
    "IngestPipeline",
    "JobKind",
    "RawRecord",
    "Reject",
    "ScheduleEntry",
    "SourceAdapter",
    "SyntheticAdapter",
    "SyntheticSpec",
    "SyntheticVariable",
    "TraceEvent",
    "poll_and_normalize",
    "run_once",
    "run_schedule",
    "synthesize",
    "virtual_clock",
]
