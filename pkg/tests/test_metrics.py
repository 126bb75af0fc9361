from __future__ import annotations

import math

import numpy as np
import pytest

from lagoontwin.core import metrics
from lagoontwin.errors import UsageError


def test_mae_identity():
    assert metrics.mae([1, 2, 3], [1, 2, 3]) == 0


def test_mae_symmetric_deviations():
    assert metrics.mae([0, 0], [1, -1]) == 1


def test_mae_hand_oracle():
    # |2-3| = 1, |4-3| = 1 -> mean 1
    assert metrics.mae([2, 4], [3, 3]) == 1


def test_cvrmse_identity():
    assert metrics.cvrmse([1, 2, 3], [1, 2, 3]) == 0


def test_cvrmse_hand_oracle():
    # RMSE = 1, mean = 3 -> 33.333...%
    assert metrics.cvrmse([2, 4], [3, 3]) == pytest.approx(100 / 3, rel=1e-12)


def test_cvrmse_zero_mean_absent():
    assert metrics.cvrmse([1, -1], [0, 0]) is None


def test_length_mismatch_rejected():
    with pytest.raises(UsageError):
        metrics.mae([1, 2], [1])
    with pytest.raises(UsageError):
        metrics.cvrmse([1], [1, 2])


def test_empty_rejected():
    with pytest.raises(UsageError):
        metrics.mae([], [])


def test_nonfinite_rejected():
    with pytest.raises(UsageError):
        metrics.mae([float("nan")], [0.0])
    with pytest.raises(UsageError):
        metrics.cvrmse([0.0], [float("inf")])


def test_permutation_invariance():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = rng.integers(2, 40)
        a = rng.normal(size=n)
        p = rng.normal(size=n)
        perm = rng.permutation(n)
        assert metrics.mae(a, p) == pytest.approx(metrics.mae(a[perm], p[perm]), rel=1e-12)
        c1, c2 = metrics.cvrmse(a, p), metrics.cvrmse(a[perm], p[perm])
        if c1 is None:
            assert c2 is None
        else:
            assert c1 == pytest.approx(c2, rel=1e-12)


def test_cvrmse_matches_direct_recomputation():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 60))
        a = rng.normal(loc=5.0, size=n)
        p = a + rng.normal(scale=0.5, size=n)
        expected = 100.0 * math.sqrt(np.mean((a - p) ** 2)) / np.mean(a)
        assert metrics.cvrmse(a.tolist(), p.tolist()) == pytest.approx(expected, rel=1e-12)


def test_score_bundles_report():
    report = metrics.score([2, 4], [3, 3])
    assert report.mae == 1
    assert report.cvrmse == pytest.approx(100 / 3)
    assert report.n == 2
