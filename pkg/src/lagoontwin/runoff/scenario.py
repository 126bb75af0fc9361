"""What-if scenarios: perturb exogenous inputs, compare against baseline.

Multipliers and offsets apply in ORIGINAL units before scaling, and only to
exogenous columns (rain gauges, weather-forecast features) — never to past
streamflow, which is system state rather than an input someone can dial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lagoontwin.errors import UsageError
from lagoontwin.features.scaling import RobustScaler
from lagoontwin.runoff.dataset import EXOGENOUS_VARIABLES, variable_of
from lagoontwin.runoff.lstm import LstmNetwork, clamp_nonnegative, lstm_forward


@dataclass(frozen=True)
class RunoffModel:
    """A trained network bundled with its scalers and recipe; scenario and
    forecast paths always run this exact combination."""

    net: LstmNetwork
    feature_scaler: RobustScaler
    target_scaler: RobustScaler
    feature_names: tuple[str, ...]
    station: str
    horizon: int
    window: int
    version: str = "v1"

    @property
    def exog_variables(self) -> tuple[str, ...]:
        present = {variable_of(name) for name in self.feature_names}
        return tuple(v for v in EXOGENOUS_VARIABLES if v in present)

    @property
    def has_forecast_block(self) -> bool:
        return any(variable_of(n).endswith("_forecast") for n in self.feature_names)

    def predict(self, window_raw: np.ndarray) -> float:
        """Scale -> forward -> inverse-scale target -> clamp at zero."""
        window_raw = np.asarray(window_raw, dtype=np.float64)
        if window_raw.shape != (self.window, len(self.feature_names)):
            raise UsageError(
                f"window must be {(self.window, len(self.feature_names))}, "
                f"got {window_raw.shape}"
            )
        scaled = self.feature_scaler.transform(window_raw)
        output, _ = lstm_forward(self.net, scaled)
        raw = self.target_scaler.inverse_transform(np.array([output]))
        return float(clamp_nonnegative(raw)[0])


@dataclass(frozen=True)
class ScenarioSpec:
    station: str
    horizon: int
    multipliers: dict[str, float] = field(default_factory=dict)
    offsets: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for variable, factor in self.multipliers.items():
            if factor < 0:
                raise UsageError(f"multiplier for {variable!r} must be >= 0")


@dataclass(frozen=True)
class ScenarioResult:
    baseline: float
    perturbed: float
    delta: float
    model_version: str

    def as_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "perturbed": self.perturbed,
            "delta": self.delta,
            "model_version": self.model_version,
        }


def perturb_window(
    window_raw: np.ndarray,
    feature_names: tuple[str, ...],
    multipliers: dict[str, float],
    offsets: dict[str, float],
    exog_variables: tuple[str, ...],
) -> np.ndarray:
    out = np.array(window_raw, dtype=np.float64, copy=True)
    for variable in set(multipliers) | set(offsets):
        if variable not in exog_variables:
            raise UsageError(
                f"{variable!r} is not a perturbable input of this model; "
                f"exogenous inputs: {list(exog_variables)}"
            )
        columns = [i for i, n in enumerate(feature_names) if variable_of(n) == variable]
        if not columns:
            raise UsageError(f"model has no {variable!r} columns")
        factor = multipliers.get(variable, 1.0)
        offset = offsets.get(variable, 0.0)
        out[:, columns] = out[:, columns] * factor + offset
    return out


def run_scenario(
    spec: ScenarioSpec, model: RunoffModel, window_raw: np.ndarray
) -> ScenarioResult:
    if spec.station != model.station:
        raise UsageError(f"model predicts {model.station!r}, not {spec.station!r}")
    if spec.horizon != model.horizon:
        raise UsageError(
            f"model trained for horizon {model.horizon}, not {spec.horizon}"
        )
    baseline = model.predict(window_raw)
    perturbed_window = perturb_window(
        window_raw, model.feature_names, spec.multipliers, spec.offsets,
        model.exog_variables,
    )
    perturbed = model.predict(perturbed_window)
    return ScenarioResult(
        baseline=baseline,
        perturbed=perturbed,
        delta=perturbed - baseline,
        model_version=model.version,
    )
