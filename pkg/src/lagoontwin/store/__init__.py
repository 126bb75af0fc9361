from lagoontwin.store.compaction import CompactionReport, compact, storage_report
from lagoontwin.store.historical import HistoricalStore, SegmentInfo
from lagoontwin.store.validation import ValidationRules, VariableRule
from lagoontwin.store.window import AppendResult, WindowStore

__all__ = [
    "AppendResult",
    "CompactionReport",
    "HistoricalStore",
    "SegmentInfo",
    "ValidationRules",
    "VariableRule",
    "WindowStore",
    "compact",
    "storage_report",
]
