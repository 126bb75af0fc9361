"""Trained-model registry: one directory per served model.

Layout under ``<root>/models/``::

    <source>__<station>__<variable>__<kind>/
        registry.json   # recipe + horizons + backtest metrics
        model.bin       # boosted-tree / linear payload ("LGTM")
        weights.bin     # recurrent-network payload ("LGTN")
        scalers.json    # run-off scalers and feature names

Model versions are content hashes, so identical training runs register
identical versions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lagoontwin.core import timeutil
from lagoontwin.core.types import SeriesKey
from lagoontwin.errors import UsageError
from lagoontwin.features.scaling import RobustScaler
from lagoontwin.learners.forecaster import GlobalForecaster
from lagoontwin.learners.model_io import dump_model, load_model
from lagoontwin.runoff.scenario import RunoffModel
from lagoontwin.runoff.weights_io import dump_weights, load_weights

KIND_GLOBAL = ("gbrt", "linear", "naive")
KIND_LSTM = "lstm"


def _key_doc(key: SeriesKey) -> dict:
    return {
        "source_id": key.source_id,
        "station_id": key.station_id,
        "variable": key.variable,
        "unit": key.unit,
    }


def _key_from_doc(doc: dict) -> SeriesKey:
    return SeriesKey(**doc)


def _version_of(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()[:12]


@dataclass
class ModelEntry:
    name: str
    kind: str
    source_id: str
    station_id: str
    variable: str
    version: str
    horizons: tuple[int, ...]
    metrics: dict[str, dict] = field(default_factory=dict)
    path: Path | None = None
    # global-model recipe
    lags: int = 0
    series_order: tuple[SeriesKey, ...] = ()
    # run-off recipe
    window: int = 0
    feature_names: tuple[str, ...] = ()
    has_forecast_block: bool = False


class ModelRegistry:
    def __init__(self, root: Path):
        self.root = Path(root) / "models"

    def _dir(self, source: str, station: str, variable: str, kind: str) -> Path:
        return self.root / f"{source}__{station}__{variable}__{kind}"

    # -- save ---------------------------------------------------------------

    def save_global(
        self,
        forecaster: GlobalForecaster,
        source_id: str,
        station_id: str,
        variable: str,
        kind: str,
        horizons: tuple[int, ...],
        metrics: dict[str, dict] | None = None,
    ) -> ModelEntry:
        if kind not in KIND_GLOBAL:
            raise UsageError(f"unknown global model kind {kind!r}")
        payload = dump_model(forecaster.model)
        version = _version_of(payload)
        directory = self._dir(source_id, station_id, variable, kind)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "model.bin").write_bytes(payload)
        doc = {
            "kind": kind,
            "source_id": source_id,
            "station_id": station_id,
            "variable": variable,
            "version": version,
            "horizons": list(horizons),
            "lags": forecaster.lags,
            "series_order": [_key_doc(k) for k in forecaster.series_order],
            "metrics": metrics or {},
            "created_at": timeutil.format_rfc3339(timeutil.utcnow()),
        }
        (directory / "registry.json").write_text(json.dumps(doc, indent=2) + "\n")
        return self._entry_from_doc(doc, directory)

    def save_runoff(
        self,
        model: RunoffModel,
        source_id: str,
        variable: str = "streamflow",
        metrics: dict[str, dict] | None = None,
    ) -> ModelEntry:
        payload = dump_weights(model.net)
        version = _version_of(payload)
        # one model per (station, horizon): distinct directories per horizon
        directory = self._dir(
            source_id, model.station, variable, f"{KIND_LSTM}_h{model.horizon}"
        )
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "weights.bin").write_bytes(payload)
        scalers = {
            "feature_names": list(model.feature_names),
            "window": model.window,
            "station": model.station,
            "horizon": model.horizon,
            "feature_scaler": {
                "center": model.feature_scaler.center.tolist(),
                "scale": model.feature_scaler.scale.tolist(),
            },
            "target_scaler": {
                "center": model.target_scaler.center.tolist(),
                "scale": model.target_scaler.scale.tolist(),
            },
        }
        (directory / "scalers.json").write_text(json.dumps(scalers, indent=2) + "\n")
        doc = {
            "kind": KIND_LSTM,
            "source_id": source_id,
            "station_id": model.station,
            "variable": variable,
            "version": version,
            "horizons": [model.horizon],
            "window": model.window,
            "feature_names": list(model.feature_names),
            "metrics": metrics or {},
            "created_at": timeutil.format_rfc3339(timeutil.utcnow()),
        }
        (directory / "registry.json").write_text(json.dumps(doc, indent=2) + "\n")
        return self._entry_from_doc(doc, directory)

    # -- load ---------------------------------------------------------------

    def _entry_from_doc(self, doc: dict, directory: Path) -> ModelEntry:
        feature_names = tuple(doc.get("feature_names", []))
        return ModelEntry(
            name=directory.name,
            kind=doc["kind"],
            source_id=doc["source_id"],
            station_id=doc["station_id"],
            variable=doc["variable"],
            version=doc["version"],
            horizons=tuple(doc["horizons"]),
            metrics=doc.get("metrics", {}),
            path=directory,
            lags=doc.get("lags", 0),
            series_order=tuple(_key_from_doc(k) for k in doc.get("series_order", [])),
            window=doc.get("window", 0),
            feature_names=feature_names,
            has_forecast_block=any("_forecast" in n for n in feature_names),
        )

    def entries(self) -> list[ModelEntry]:
        if not self.root.is_dir():
            return []
        out = []
        for directory in sorted(self.root.iterdir()):
            manifest = directory / "registry.json"
            if manifest.exists():
                doc = json.loads(manifest.read_text())
                out.append(self._entry_from_doc(doc, directory))
        return out

    def find_all(
        self, station_id: str, variable: str, kind: str | None = None
    ) -> list[ModelEntry]:
        return [
            e
            for e in self.entries()
            if e.station_id == station_id
            and e.variable == variable
            and (kind is None or e.kind == kind)
        ]

    def find(
        self, station_id: str, variable: str, kind: str | None = None
    ) -> ModelEntry | None:
        matches = self.find_all(station_id, variable, kind)
        return matches[0] if matches else None

    def load_global(self, entry: ModelEntry) -> GlobalForecaster:
        model = load_model((entry.path / "model.bin").read_bytes())
        return GlobalForecaster(
            model=model, lags=entry.lags, series_order=entry.series_order
        )

    def load_runoff(self, entry: ModelEntry) -> RunoffModel:
        net = load_weights((entry.path / "weights.bin").read_bytes())
        scalers = json.loads((entry.path / "scalers.json").read_text())
        return RunoffModel(
            net=net,
            feature_scaler=RobustScaler(
                center=np.array(scalers["feature_scaler"]["center"]),
                scale=np.array(scalers["feature_scaler"]["scale"]),
            ),
            target_scaler=RobustScaler(
                center=np.array(scalers["target_scaler"]["center"]),
                scale=np.array(scalers["target_scaler"]["scale"]),
            ),
            feature_names=tuple(scalers["feature_names"]),
            station=scalers["station"],
            horizon=scalers["horizon"],
            window=scalers["window"],
            version=entry.version,
        )
