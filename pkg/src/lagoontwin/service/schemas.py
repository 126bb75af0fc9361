"""Request/response models for the HTTP API.

All timestamps are RFC3339 text; every response carries the snapshot's
``loaded_at`` so clients (and the isolation tests) can pin responses to one
snapshot. Errors use the uniform ``{error, detail}`` body.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator


class StationOut(BaseModel):
    station_id: str
    name: str
    latitude: float
    longitude: float
    source_id: str
    variables: list[str]


class PointOut(BaseModel):
    timestamp: str
    value: float
    quality: str


class SeriesOut(BaseModel):
    source: str
    station: str
    variable: str
    unit: str
    points: list[PointOut]
    loaded_at: str


class ForecastOut(BaseModel):
    station: str
    variable: str
    horizon: int
    values: list[float]
    issued_at: str
    model_version: str
    metrics: dict
    stale: bool
    loaded_at: str
    # which inputs a what-if scenario may perturb; empty means the scenario
    # panel has nothing to drive for this series
    exog_variables: list[str] = []


class ScenarioIn(BaseModel):
    station: str
    horizon: int = Field(ge=1)
    multipliers: dict[str, float] = Field(default_factory=dict)
    offsets: dict[str, float] = Field(default_factory=dict)

    @field_validator("multipliers")
    @classmethod
    def multipliers_nonnegative(cls, value: dict[str, float]) -> dict[str, float]:
        for variable, factor in value.items():
            if factor < 0:
                raise ValueError(f"multiplier for {variable!r} must be >= 0")
        return value


class ScenarioOut(BaseModel):
    baseline: float
    perturbed: float
    delta: float
    model_version: str
    loaded_at: str


class ReloadOut(BaseModel):
    snapshot_id: int
    loaded_at: str


class ErrorOut(BaseModel):
    error: str
    detail: str
