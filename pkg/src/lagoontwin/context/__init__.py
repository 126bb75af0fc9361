from lagoontwin.context.entities import ContextEntity, make_urn, parse_urn
from lagoontwin.context.geo import haversine_m
from lagoontwin.context.store import ContextStore, TimedValue

__all__ = [
    "ContextEntity",
    "ContextStore",
    "TimedValue",
    "haversine_m",
    "make_urn",
    "parse_urn",
]
