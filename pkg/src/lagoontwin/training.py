"""Training orchestration: from stored series to a registered champion.

Chains the published recipe end to end: resample to a common grid, drop
series with excessive missingness, impute with zero-weighted targets,
split 70/10/20 chronologically, fit the candidate set, backtest, and pick
the champion. Candidate diversity comes from boosting presets plus the
linear and persistence baselines; the optional search adds a tuned entry.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta

import numpy as np

from lagoontwin.config import Platform
from lagoontwin.core import timeutil
from lagoontwin.core.types import Aggregation, SeriesKey
from lagoontwin.core.resample import resample
from lagoontwin.errors import UsageError
from lagoontwin.features.align import (
    AlignedSeries,
    align_observations,
    drop_sparse,
    impute_linear,
)
from lagoontwin.features.matrix import build_lag_matrix, chrono_split
from lagoontwin.learners.backtest import (
    REFIT_ONCE,
    BacktestReport,
    backtest,
    select_champion,
)
from lagoontwin.learners.forecaster import (
    GlobalForecaster,
    fit_global,
    matrix_model_factory,
)
from lagoontwin.learners.gbrt import HyperParams, fit_gbrt
from lagoontwin.learners.linear import NaivePersistence, fit_linear
from lagoontwin.learners.search import SearchSpace, Trial, search
from lagoontwin.core.metrics import mae as mae_metric

HOUR = timedelta(hours=1)

DEFAULT_HOURLY_LAGS = 24
DEFAULT_WEEKLY_LAGS = 4

GBRT_PRESETS = {
    "gbrt-deep-slow": HyperParams(
        n_trees=150, learning_rate=0.05, max_depth=5, min_samples_leaf=5
    ),
    "gbrt-shallow-fast": HyperParams(
        n_trees=80, learning_rate=0.15, max_depth=3, min_samples_leaf=2
    ),
}


def load_aligned_series(
    platform: Platform,
    source_id: str,
    variable: str,
    stations: list[str] | None = None,
    step: timedelta = HOUR,
) -> list[AlignedSeries]:
    """Merge historical + window data per station, resample onto one shared
    grid, and align. Series that never report are omitted."""
    descriptor = platform.catalog.get(source_id)
    if descriptor.unit_of(variable) is None:
        raise UsageError(f"source {source_id!r} has no variable {variable!r}")
    aggregation = descriptor.aggregation_of(variable)
    if stations is None:
        stations = sorted(
            {
                station
                for (src, station, var) in platform.window.list_series()
                if src == source_id and var == variable
            }
            | {
                seg.station_id
                for seg in platform.hist.segments()
                if seg.source_id == source_id and seg.variable == variable
            }
        )
    far_past = datetime(1970, 1, 2, tzinfo=timeutil.UTC)
    far_future = timeutil.utcnow() + timedelta(days=1)
    per_station: dict[str, list] = {}
    for station in stations:
        key = platform.catalog.series_key(source_id, station, variable)
        merged = platform.hist.read(key, far_past, far_future)
        seen = {o.timestamp for o in merged}
        merged.extend(
            o
            for o in platform.window.read_all(key)
            if o.timestamp not in seen
        )
        merged.sort(key=lambda o: o.timestamp)
        if merged:
            per_station[station] = resample(merged, step, aggregation)
    if not per_station:
        raise UsageError(f"no data stored for {source_id}/{variable}")

    start = min(obs[0].timestamp for obs in per_station.values())
    end = max(obs[-1].timestamp for obs in per_station.values())
    length = int((end - start) / step) + 1
    out = []
    for station, observations in sorted(per_station.items()):
        key = platform.catalog.series_key(source_id, station, variable)
        out.append(align_observations(observations, key, start, step, length))
    return out


@dataclass
class TrainingOutcome:
    champion: str
    reports: dict[str, BacktestReport]
    forecaster: GlobalForecaster
    trials: list[Trial]
    horizons: tuple[int, ...]
    lags: int


def _gbrt_factory(lags: int, params: HyperParams):
    def factory(train_set: list[AlignedSeries]) -> GlobalForecaster:
        return fit_global(
            train_set, lags=lags,
            model_factory=matrix_model_factory(
                lambda X, y, w: fit_gbrt(X, y, w, params)
            ),
        )

    return factory


def _linear_factory(lags: int):
    def factory(train_set: list[AlignedSeries]) -> GlobalForecaster:
        return fit_global(train_set, lags=lags, model_factory=matrix_model_factory(fit_linear))

    return factory


def _naive_factory(train_set: list[AlignedSeries]) -> GlobalForecaster:
    return GlobalForecaster(
        model=NaivePersistence(), lags=1,
        series_order=tuple(s.series for s in train_set),
    )


def validation_objective(series_set: list[AlignedSeries], lags: int):
    """Objective for the hyperparameter search: MAE on the chronological
    validation block, weights honored, scorable rows only."""
    matrix = build_lag_matrix(series_set, lags=lags)
    train, val, _ = chrono_split(matrix)

    def objective(params: HyperParams) -> float:
        model = fit_gbrt(train.X, train.y, train.weights, params)
        scorable = val.weights > 0
        if not scorable.any():
            raise UsageError("validation block has no scorable rows")
        predictions = model.predict(val.X[scorable])
        return mae_metric(val.y[scorable].tolist(), predictions.tolist())

    return objective


def prepare_series(
    raw_series: list[AlignedSeries], sparsity_threshold: float = 0.5
) -> tuple[list[AlignedSeries], list]:
    retained, dropped = drop_sparse(raw_series, sparsity_threshold)
    if not retained:
        raise UsageError("every series exceeded the missingness threshold")
    return [impute_linear(s) for s in retained], dropped


def train_global_candidates(
    series_set: list[AlignedSeries],
    lags: int = DEFAULT_HOURLY_LAGS,
    horizons: tuple[int, ...] = (1, 6, 12, 24),
    n_folds: int = 6,
    search_budget: int = 0,
    seed: int = 0,
) -> TrainingOutcome:
    """Backtest the candidate set, pick a champion, refit it on all data."""
    factories = {
        name: _gbrt_factory(lags, replace(params, seed=seed))
        for name, params in GBRT_PRESETS.items()
    }
    factories["linear"] = _linear_factory(lags)
    factories["naive"] = _naive_factory
    trials: list[Trial] = []
    if search_budget > 0:
        best_params, trials = search(
            SearchSpace(), validation_objective(series_set, lags),
            budget=search_budget, seed=seed,
        )
        factories["gbrt-searched"] = _gbrt_factory(lags, best_params)

    reports = {
        name: backtest(
            factory, series_set, horizons=horizons, n_folds=n_folds,
            refit=REFIT_ONCE, candidate=name, lags_hint=lags,
        )
        for name, factory in factories.items()
    }
    champion, flagged = select_champion(reports, primary_horizon=min(horizons))
    forecaster = factories[champion](series_set)
    return TrainingOutcome(
        champion=champion,
        reports=flagged,
        forecaster=forecaster,
        trials=trials,
        horizons=horizons,
        lags=lags,
    )


def metrics_doc(report: BacktestReport) -> dict[str, dict]:
    out = {}
    for h, metric in report.per_horizon.items():
        if metric is None:
            continue
        out[str(h)] = {
            "mae": metric.mae,
            "cvrmse": metric.cvrmse,
            "n": metric.n,
        }
    return out
