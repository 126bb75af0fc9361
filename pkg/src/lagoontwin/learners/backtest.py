"""Rolling-origin backtesting and champion selection.

Each fold fixes an origin o: the forecaster trains on data strictly before
o and predicts o .. o+max(horizon)-1. Evaluation ranges of consecutive
folds never overlap. Per-horizon metrics are the mean of per-fold metrics;
points whose actual value was imputed are excluded from evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from lagoontwin.core import metrics
from lagoontwin.core.types import MetricReport
from lagoontwin.errors import UsageError
from lagoontwin.features.align import AlignedSeries

REFIT_PER_FOLD = "per_fold"
REFIT_ONCE = "once"

ForecasterFactory = Callable[[list[AlignedSeries]], object]


@dataclass(frozen=True)
class BacktestReport:
    candidate: str
    horizons: tuple[int, ...]
    per_horizon: dict[int, MetricReport | None]
    fold_origins: tuple[int, ...]
    refit: str
    champion: bool = False


def _truncate(series: AlignedSeries, length: int) -> AlignedSeries:
    return AlignedSeries(
        series=series.series,
        start=series.start,
        step=series.step,
        values=series.values[:length],
        imputed_mask=series.imputed_mask[:length],
    )


def _mean_reports(folds: list[MetricReport]) -> MetricReport | None:
    if not folds:
        return None
    cv_values = [r.cvrmse for r in folds if r.cvrmse is not None]
    return MetricReport(
        mae=float(np.mean([r.mae for r in folds])),
        cvrmse=float(np.mean(cv_values)) if cv_values else None,
        n=sum(r.n for r in folds),
    )


def backtest(
    factory: ForecasterFactory,
    series_set: list[AlignedSeries],
    horizons: tuple[int, ...],
    n_folds: int,
    refit: str = REFIT_PER_FOLD,
    candidate: str = "candidate",
    lags_hint: int = 0,
) -> BacktestReport:
    if n_folds < 1:
        raise UsageError("need at least one fold")
    if refit not in (REFIT_PER_FOLD, REFIT_ONCE):
        raise UsageError(f"unknown refit policy {refit!r}")
    if not horizons:
        raise UsageError("need at least one horizon")
    lengths = {len(s) for s in series_set}
    if len(lengths) != 1:
        raise UsageError("all series must share one grid length")
    n = lengths.pop()
    max_h = max(horizons)
    first_origin = n - n_folds * max_h
    min_train = max(lags_hint + max_h, 2)
    if first_origin < min_train:
        raise UsageError(
            f"folds too short: need {min_train + n_folds * max_h} points, have {n}"
        )
    origins = tuple(first_origin + i * max_h for i in range(n_folds))

    forecaster = None
    per_horizon_folds: dict[int, list[MetricReport]] = {h: [] for h in horizons}
    for origin in origins:
        train = [_truncate(s, origin) for s in series_set]
        if forecaster is None or refit == REFIT_PER_FOLD:
            forecaster = factory(train)
        history = {s.series: s.values[:origin] for s in series_set}
        predictions = forecaster.forecast(history, max_h)
        for h in horizons:
            actuals, predicted = [], []
            for s in series_set:
                t = origin + h - 1
                if s.imputed_mask[t]:
                    continue  # never score against fabricated actuals
                actuals.append(float(s.values[t]))
                predicted.append(float(predictions[s.series][h - 1]))
            if actuals:
                per_horizon_folds[h].append(metrics.score(actuals, predicted))

    return BacktestReport(
        candidate=candidate,
        horizons=tuple(horizons),
        per_horizon={h: _mean_reports(per_horizon_folds[h]) for h in horizons},
        fold_origins=origins,
        refit=refit,
    )


def select_champion(
    reports: dict[str, BacktestReport], primary_horizon: int
) -> tuple[str, dict[str, BacktestReport]]:
    """Lowest mean MAE at the primary horizon; ties broken by lower CVRMSE,
    then candidate id. Returns (champion id, reports with flag set)."""
    if not reports:
        raise UsageError("no candidates to select from")

    def sort_key(item: tuple[str, BacktestReport]):
        cid, report = item
        metric = report.per_horizon.get(primary_horizon)
        if metric is None:
            return (float("inf"), float("inf"), cid)
        cv = metric.cvrmse if metric.cvrmse is not None else float("inf")
        return (metric.mae, cv, cid)

    champion = min(reports.items(), key=sort_key)[0]
    flagged = {
        cid: replace(report, champion=(cid == champion))
        for cid, report in reports.items()
    }
    return champion, flagged
