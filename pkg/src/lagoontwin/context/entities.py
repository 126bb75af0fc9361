"""Context entity model: a keyValues subset of linked-data context management.

Entities carry flattened properties, relationships (lists of target URNs),
and an optional point location. Ids follow ``urn:ngsi-ld:<Type>:<suffix>``
with the Type segment equal to the entity type. Relationship targets may
dangle; a lint operation flags them rather than rejecting writes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from lagoontwin.errors import UsageError

_URN_RE = re.compile(r"^urn:ngsi-ld:(?P<type>[A-Za-z][A-Za-z0-9]*):(?P<suffix>.+)$")


def parse_urn(urn: str) -> tuple[str, str]:
    match = _URN_RE.match(urn)
    if not match:
        raise UsageError(f"malformed entity URN: {urn!r}")
    return match.group("type"), match.group("suffix")


def make_urn(entity_type: str, suffix: str) -> str:
    urn = f"urn:ngsi-ld:{entity_type}:{suffix}"
    parse_urn(urn)
    return urn


@dataclass(frozen=True)
class ContextEntity:
    id: str
    type: str
    properties: dict[str, Any] = field(default_factory=dict)
    relationships: dict[str, tuple[str, ...]] = field(default_factory=dict)
    location: tuple[float, float] | None = None  # (lat, lon)

    def __post_init__(self) -> None:
        urn_type, _ = parse_urn(self.id)
        if urn_type != self.type:
            raise UsageError(
                f"URN type {urn_type!r} does not match entity type {self.type!r}"
            )
        normalized = {name: tuple(targets) for name, targets in self.relationships.items()}
        for targets in normalized.values():
            for target in targets:
                parse_urn(target)  # targets must be URNs (may dangle)
        object.__setattr__(self, "relationships", normalized)
        if self.location is not None:
            lat, lon = self.location
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise UsageError(f"location out of range: {self.location}")
            object.__setattr__(self, "location", (float(lat), float(lon)))

    def key_values(self) -> dict[str, Any]:
        """Flattened document shape served by the entities endpoint."""
        doc: dict[str, Any] = {"id": self.id, "type": self.type}
        doc.update(self.properties)
        for name, targets in self.relationships.items():
            doc[name] = list(targets)
        if self.location is not None:
            doc["location"] = {
                "type": "Point",
                "coordinates": [self.location[0], self.location[1]],
            }
        return doc

    @classmethod
    def from_key_values(cls, doc: dict[str, Any]) -> "ContextEntity":
        properties: dict[str, Any] = {}
        relationships: dict[str, tuple[str, ...]] = {}
        location = None
        for name, value in doc.items():
            if name in ("id", "type"):
                continue
            if name == "location" and isinstance(value, dict):
                coords = value.get("coordinates", [])
                location = (float(coords[0]), float(coords[1]))
                continue
            if (
                isinstance(value, list)
                and value
                and all(isinstance(v, str) and _URN_RE.match(v) for v in value)
            ):
                relationships[name] = tuple(value)
                continue
            properties[name] = value
        return cls(
            id=doc["id"],
            type=doc["type"],
            properties=properties,
            relationships=relationships,
            location=location,
        )
