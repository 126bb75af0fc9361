"""HTTP application tier: catalog, window, history, forecasts, entities,
what-if scenarios, and the hourly in-memory reload.

The FastAPI app wraps the core package; handlers read exactly one snapshot
(grabbed once at entry) and never mutate store state. JSON errors use the
uniform ``{error, detail}`` body, including request-validation failures
(400, not the framework default).
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
from datetime import datetime

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from lagoontwin.config import Platform
from lagoontwin.core import timeutil
from lagoontwin.errors import ConflictError, IntegrityError, TwinError, UsageError
from lagoontwin.registry import ModelEntry
from lagoontwin.runoff.lstm import clamp_nonnegative
from lagoontwin.runoff.scenario import RunoffModel, ScenarioSpec, run_scenario
from lagoontwin.service import state as state_mod
from lagoontwin.service.schemas import (
    ForecastOut,
    PointOut,
    ReloadOut,
    ScenarioIn,
    ScenarioOut,
    SeriesOut,
    StationOut,
)
from lagoontwin.service.state import ServeState, StateHolder

logger = logging.getLogger(__name__)

MAX_WINDOW_DAYS = 7


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str):
        self.status = status
        self.error = error
        self.detail = detail
        super().__init__(detail)


def _error_response(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": error, "detail": detail})


def create_app(platform: Platform, reload_interval_s: float | None = None) -> FastAPI:
    holder = StateHolder(platform)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = None
        if reload_interval_s:
            async def reload_loop():
                while True:
                    await asyncio.sleep(reload_interval_s)
                    await asyncio.to_thread(holder.reload)

            task = asyncio.create_task(reload_loop())
        yield
        if task:
            task.cancel()

    app = FastAPI(title="lagoontwin", lifespan=lifespan)
    app.state.holder = holder

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return _error_response(exc.status, exc.error, exc.detail)

    @app.exception_handler(UsageError)
    async def handle_usage(request: Request, exc: UsageError):
        return _error_response(400, "usage", str(exc))

    @app.exception_handler(ConflictError)
    async def handle_conflict(request: Request, exc: ConflictError):
        return _error_response(409, "conflict", str(exc))

    @app.exception_handler(IntegrityError)
    async def handle_integrity(request: Request, exc: IntegrityError):
        return _error_response(500, "integrity", str(exc))

    @app.exception_handler(TwinError)
    async def handle_twin(request: Request, exc: TwinError):
        return _error_response(500, "internal", str(exc))

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error_response(400, "validation", json.dumps(exc.errors(), default=str))

    # -- endpoints -----------------------------------------------------------

    @app.get("/stations", response_model=list[StationOut])
    def get_stations():
        snapshot = holder.current
        out = []
        for station in snapshot.catalog.stations():
            descriptor = snapshot.catalog.get(station.source_id)
            out.append(
                StationOut(
                    station_id=station.station_id,
                    name=station.name,
                    latitude=station.latitude,
                    longitude=station.longitude,
                    source_id=station.source_id,
                    variables=[v for v, _ in descriptor.variables],
                )
            )
        return out

    def _resolve_series(snapshot: ServeState, station: str, variable: str, source: str | None):
        candidates = [
            triple for triple in sorted(snapshot.window_data)
            if triple[1] == station and triple[2] == variable
            and (source is None or triple[0] == source)
        ]
        if not candidates:
            raise ApiError(404, "not_found", f"no series for {station}/{variable}")
        return snapshot.catalog.series_key(*candidates[0])

    @app.get("/window", response_model=SeriesOut)
    def get_window(
        station: str,
        variable: str,
        days: int = Query(default=MAX_WINDOW_DAYS),
        source: str | None = None,
    ):
        snapshot = holder.current
        if not 1 <= days <= MAX_WINDOW_DAYS:
            raise ApiError(
                400, "usage",
                f"days must be in [1, {MAX_WINDOW_DAYS}]: the window store holds "
                f"only the last {MAX_WINDOW_DAYS} days",
            )
        key = _resolve_series(snapshot, station, variable, source)
        cutoff = snapshot.loaded_at - timeutil.DAY * days
        points = [
            PointOut(
                timestamp=timeutil.format_rfc3339(o.timestamp),
                value=o.value,
                quality=o.quality.value,
            )
            for o in snapshot.window_series(*key.triple)
            if o.timestamp >= cutoff
        ]
        return SeriesOut(
            source=key.source_id,
            station=key.station_id,
            variable=key.variable,
            unit=key.unit,
            points=points,
            loaded_at=timeutil.format_rfc3339(snapshot.loaded_at),
        )

    @app.get("/history", response_model=SeriesOut)
    def get_history(
        station: str,
        variable: str,
        start: str = Query(alias="from"),
        end: str = Query(alias="to"),
        source: str | None = None,
    ):
        snapshot = holder.current
        ts_from = timeutil.parse_rfc3339(start)
        ts_to = timeutil.parse_rfc3339(end)
        if ts_from > ts_to:
            raise ApiError(400, "usage", "from must be <= to")
        # served from the historical store itself, checksums verified on read
        segments = platform.hist.segments()
        candidates = sorted(
            {
                (s.source_id, s.station_id, s.variable, s.unit)
                for s in segments
                if s.station_id == station and s.variable == variable
                and (source is None or s.source_id == source)
            }
        )
        if not candidates:
            raise ApiError(404, "not_found", f"no history for {station}/{variable}")
        from lagoontwin.core.types import SeriesKey

        key = SeriesKey(*candidates[0])
        observations = platform.hist.read(key, ts_from, ts_to)
        points = [
            PointOut(
                timestamp=timeutil.format_rfc3339(o.timestamp),
                value=o.value,
                quality=o.quality.value,
            )
            for o in observations
        ]
        return SeriesOut(
            source=key.source_id,
            station=key.station_id,
            variable=key.variable,
            unit=key.unit,
            points=points,
            loaded_at=timeutil.format_rfc3339(snapshot.loaded_at),
        )

    def _forecast_entries(snapshot: ServeState, station: str, variable: str):
        return [
            e for e in snapshot.model_entries
            if e.station_id == station and e.variable == variable
        ]

    def _compute_forecast(
        snapshot: ServeState, entry: ModelEntry, horizon: int
    ) -> list[float]:
        model = snapshot.models[entry.name]
        if isinstance(model, RunoffModel):
            window = state_mod.runoff_window(snapshot, entry, model)
            return [model.predict(window)]
        histories = state_mod.global_histories(snapshot, entry)
        requested = snapshot.catalog.series_key(
            entry.source_id, entry.station_id, entry.variable
        )
        forecasts = model.forecast(histories, horizon)
        if requested not in forecasts:
            raise ApiError(
                500, "internal", f"model {entry.name} does not cover {requested}"
            )
        return [float(v) for v in forecasts[requested]]

    @app.get("/forecast", response_model=ForecastOut)
    def get_forecast(station: str, variable: str, horizon: int = 1):
        snapshot = holder.current
        if horizon < 1:
            raise ApiError(400, "usage", "horizon must be >= 1")
        entries = _forecast_entries(snapshot, station, variable)
        if not entries:
            raise ApiError(404, "not_found", f"no model for {station}/{variable}")
        usable = [e for e in entries if horizon in e.horizons]
        if not usable:
            available = sorted({h for e in entries for h in e.horizons})
            raise ApiError(
                400, "usage",
                f"horizon {horizon} not trained; available horizons: {available}",
            )
        entry = usable[0]
        cache_key = (station, variable, horizon)
        cached = snapshot.forecast_cache.get(cache_key)
        if cached is not None:
            return cached
        values = _compute_forecast(snapshot, entry, horizon)
        if variable == "streamflow":
            values = [float(v) for v in clamp_nonnegative(values)]
        model = snapshot.models[entry.name]
        exog = list(model.exog_variables) if isinstance(model, RunoffModel) else []
        response = ForecastOut(
            station=station,
            variable=variable,
            horizon=horizon,
            values=values,
            issued_at=timeutil.format_rfc3339(timeutil.utcnow()),
            model_version=entry.version,
            metrics=entry.metrics,
            stale=snapshot.is_stale(),
            loaded_at=timeutil.format_rfc3339(snapshot.loaded_at),
            exog_variables=exog,
        )
        snapshot.forecast_cache[cache_key] = response
        return response

    @app.post("/scenario", response_model=ScenarioOut)
    def post_scenario(body: ScenarioIn):
        snapshot = holder.current
        lstm_entries = [
            e for e in snapshot.model_entries
            if e.station_id == body.station and e.variable == "streamflow"
            and e.kind.startswith("lstm")
        ]
        if not lstm_entries:
            raise ApiError(
                409, "conflict",
                f"no run-off model registered for station {body.station!r}",
            )
        matching = [e for e in lstm_entries if body.horizon in e.horizons]
        if not matching:
            available = sorted({h for e in lstm_entries for h in e.horizons})
            raise ApiError(
                400, "usage",
                f"horizon {body.horizon} not trained; available horizons: {available}",
            )
        entry = matching[0]
        model: RunoffModel = snapshot.models[entry.name]
        perturbed_vars = set(body.multipliers) | set(body.offsets)
        wants_forecast_block = any(v.endswith("_forecast") for v in perturbed_vars)
        if wants_forecast_block and not entry.has_forecast_block:
            raise ApiError(
                409, "conflict",
                "model was trained without the weather-forecast block; "
                "forecast variables cannot be perturbed",
            )
        window = state_mod.runoff_window(snapshot, entry, model)
        spec = ScenarioSpec(
            station=body.station,
            horizon=body.horizon,
            multipliers=dict(body.multipliers),
            offsets=dict(body.offsets),
        )
        result = run_scenario(spec, model, window)
        return ScenarioOut(
            baseline=result.baseline,
            perturbed=result.perturbed,
            delta=result.delta,
            model_version=result.model_version,
            loaded_at=timeutil.format_rfc3339(snapshot.loaded_at),
        )

    @app.get("/entities")
    def get_entities(
        request: Request,
        type: str | None = None,
        coordinates: str | None = None,
        georel: str | None = None,
        options: str | None = None,
    ):
        snapshot = holder.current
        near = None
        if georel is not None:
            if not georel.startswith("near"):
                raise ApiError(400, "usage", f"unsupported georel {georel!r}")
            if coordinates is None:
                raise ApiError(400, "usage", "georel=near requires coordinates")
            max_distance = None
            for part in georel.split(";"):
                if part.startswith("maxDistance=="):
                    max_distance = float(part.split("==", 1)[1])
            if max_distance is None:
                raise ApiError(400, "usage", "georel=near requires maxDistance==<m>")
            try:
                point = json.loads(coordinates)
                lat, lon = float(point[0]), float(point[1])
            except (ValueError, TypeError, IndexError):
                raise ApiError(400, "usage", f"bad coordinates {coordinates!r}")
            near = ((lat, lon), max_distance)
        entities = snapshot.context.query(entity_type=type, near=near)
        return [e.key_values() for e in entities]

    @app.post("/reload", response_model=ReloadOut)
    def post_reload():
        snapshot = holder.reload()
        return ReloadOut(
            snapshot_id=snapshot.snapshot_id,
            loaded_at=timeutil.format_rfc3339(snapshot.loaded_at),
        )

    return app
