"""Evaluation metrics used by every report in the platform.

CVRMSE divides the RMSE by the mean of the *actual* series over the
evaluation window and is expressed in percent. When that mean is
numerically zero the ratio is meaningless (it blows up on near-zero
streamflow), so ``cvrmse`` returns None instead of a number.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from lagoontwin.core.types import MetricReport
from lagoontwin.errors import UsageError

ZERO_MEAN_THRESHOLD = 1e-12


def _check_pair(actual: Sequence[float], predicted: Sequence[float]) -> None:
    if len(actual) == 0:
        raise UsageError("empty input")
    if len(actual) != len(predicted):
        raise UsageError(f"length mismatch: {len(actual)} vs {len(predicted)}")
    for x in actual:
        if not math.isfinite(x):
            raise UsageError("actual contains a non-finite value")
    for x in predicted:
        if not math.isfinite(x):
            raise UsageError("predicted contains a non-finite value")


def mae(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Mean absolute error, in the variable's unit."""
    _check_pair(actual, predicted)
    return sum(abs(a - p) for a, p in zip(actual, predicted)) / len(actual)


def rmse(actual: Sequence[float], predicted: Sequence[float]) -> float:
    _check_pair(actual, predicted)
    return math.sqrt(sum((a - p) ** 2 for a, p in zip(actual, predicted)) / len(actual))


def cvrmse(actual: Sequence[float], predicted: Sequence[float]) -> float | None:
    """RMSE / mean(actual) in percent; None when |mean(actual)| < 1e-12."""
    _check_pair(actual, predicted)
    mean_actual = sum(actual) / len(actual)
    if abs(mean_actual) < ZERO_MEAN_THRESHOLD:
        return None
    return 100.0 * rmse(actual, predicted) / mean_actual


def score(actual: Sequence[float], predicted: Sequence[float]) -> MetricReport:
    return MetricReport(
        mae=mae(actual, predicted),
        cvrmse=cvrmse(actual, predicted),
        n=len(actual),
    )
