"""Data-root layout and resolution.

Everything the platform writes lives under one data root, set by the
``TWIN_DATA_ROOT`` environment variable or the CLI ``--data-root`` flag
(default ``./twin-data``)::

    <root>/catalog/    one JSON document per source
    <root>/window/     7-day append logs
    <root>/hist/       columnar segments + index.json
    <root>/context/    entity snapshots
    <root>/models/     trained model registry
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from lagoontwin.context.store import ContextStore
from lagoontwin.core.catalog import Catalog
from lagoontwin.registry import ModelRegistry
from lagoontwin.store.historical import HistoricalStore
from lagoontwin.store.window import WindowStore

ENV_DATA_ROOT = "TWIN_DATA_ROOT"
DEFAULT_DATA_ROOT = "twin-data"


def resolve_data_root(explicit: str | os.PathLike | None = None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(ENV_DATA_ROOT, DEFAULT_DATA_ROOT))


@dataclass
class Platform:
    """Handles to every store under one data root."""

    root: Path
    catalog: Catalog
    window: WindowStore
    hist: HistoricalStore
    context: ContextStore
    registry: ModelRegistry

    @classmethod
    def open(cls, root: str | os.PathLike | None = None) -> "Platform":
        path = resolve_data_root(root)
        path.mkdir(parents=True, exist_ok=True)
        return cls(
            root=path,
            catalog=Catalog(path),
            window=WindowStore(path / "window"),
            hist=HistoricalStore(path / "hist"),
            context=ContextStore(path),
            registry=ModelRegistry(path),
        )
