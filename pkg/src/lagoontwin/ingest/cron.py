"""Minimal 5-field cron matcher (minute hour day-of-month month day-of-week).

Supports ``*``, ``*/n``, single numbers, and comma lists — enough to express
the hourly/daily/weekly publishing schedules the sources use. Day-of-week:
0 = Sunday (as in classic cron), 7 accepted as an alias for Sunday.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from lagoontwin.errors import UsageError

_FIELD_RANGES = [(0, 59), (0, 23), (1, 31), (1, 12), (0, 7)]


def _parse_field(spec: str, lo: int, hi: int) -> frozenset[int] | None:
    """None means 'any value' (a bare *)."""
    if spec == "*":
        return None
    values: set[int] = set()
    for part in spec.split(","):
        if part.startswith("*/"):
            try:
                step = int(part[2:])
            except ValueError:
                raise UsageError(f"bad cron step {part!r}") from None
            if step <= 0:
                raise UsageError(f"bad cron step {part!r}")
            values.update(range(lo, hi + 1, step))
        else:
            try:
                n = int(part)
            except ValueError:
                raise UsageError(f"bad cron value {part!r}") from None
            if not lo <= n <= hi:
                raise UsageError(f"cron value {n} outside [{lo},{hi}]")
            values.add(n)
    return frozenset(values)


@dataclass(frozen=True)
class CronExpr:
    minute: frozenset[int] | None
    hour: frozenset[int] | None
    day_of_month: frozenset[int] | None
    month: frozenset[int] | None
    day_of_week: frozenset[int] | None

    @classmethod
    def parse(cls, expression: str) -> "CronExpr":
        fields = expression.split()
        if len(fields) != 5:
            raise UsageError(f"cron expression needs 5 fields: {expression!r}")
        parsed = [
            _parse_field(f, lo, hi) for f, (lo, hi) in zip(fields, _FIELD_RANGES)
        ]
        return cls(*parsed)

    def matches(self, ts: datetime) -> bool:
        if self.minute is not None and ts.minute not in self.minute:
            return False
        if self.hour is not None and ts.hour not in self.hour:
            return False
        if self.day_of_month is not None and ts.day not in self.day_of_month:
            return False
        if self.month is not None and ts.month not in self.month:
            return False
        if self.day_of_week is not None:
            # datetime: Monday=0 ... Sunday=6; cron: Sunday=0 (7 alias)
            cron_dow = (ts.weekday() + 1) % 7
            if cron_dow not in self.day_of_week and not (
                cron_dow == 0 and 7 in self.day_of_week
            ):
                return False
        return True
