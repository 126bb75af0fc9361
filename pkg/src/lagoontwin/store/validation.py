"""Per-variable validation rules applied during weekly compaction.

Rules are a declarative table (min, max, max step change) loaded from JSON;
a default table ships with the package. Variables without an entry pass
unchecked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from lagoontwin.core.types import Observation


@dataclass(frozen=True)
class VariableRule:
    min_value: float | None = None
    max_value: float | None = None
    max_step: float | None = None  # vs the previous accepted record


class ValidationRules:
    def __init__(self, rules: dict[str, VariableRule] | None = None):
        self._rules = dict(rules or {})

    @classmethod
    def from_json(cls, path: Path) -> "ValidationRules":
        return cls._from_doc(json.loads(Path(path).read_text()))

    @classmethod
    def default(cls) -> "ValidationRules":
        raw = resources.files("lagoontwin.store").joinpath("validation_rules.json")
        return cls._from_doc(json.loads(raw.read_text()))

    @classmethod
    def _from_doc(cls, doc: dict) -> "ValidationRules":
        rules = {
            variable: VariableRule(
                min_value=entry.get("min"),
                max_value=entry.get("max"),
                max_step=entry.get("max_step"),
            )
            for variable, entry in doc.get("rules", {}).items()
        }
        return cls(rules)

    def check(self, obs: Observation, previous_accepted: Observation | None) -> str | None:
        """Return a rejection reason or None if the record passes."""
        rule = self._rules.get(obs.series.variable)
        if rule is None:
            return None
        if rule.min_value is not None and obs.value < rule.min_value:
            return "range"
        if rule.max_value is not None and obs.value > rule.max_value:
            return "range"
        if (
            rule.max_step is not None
            and previous_accepted is not None
            and abs(obs.value - previous_accepted.value) > rule.max_step
        ):
            return "step"
        return None
