from __future__ import annotations

from datetime import timedelta

import numpy as np
import pytest

from lagoontwin.errors import UsageError
from lagoontwin.features.align import (
    AlignedSeries,
    align_observations,
    drop_sparse,
    impute_linear,
    missing_fraction,
)
from lagoontwin.features.matrix import (
    WEIGHT_ANY_TOUCH,
    build_lag_matrix,
    chrono_split,
)
from lagoontwin.features.scaling import RobustScaler

from .conftest import T0, make_key, make_obs

HOUR = timedelta(hours=1)


def aligned(values, mask=None, key=None) -> AlignedSeries:
    values = np.array(values, dtype=float)
    if mask is None:
        mask = np.zeros(len(values), dtype=bool)
    return AlignedSeries(
        series=key or make_key(),
        start=T0,
        step=HOUR,
        values=values,
        imputed_mask=np.array(mask, dtype=bool),
    )


NAN = float("nan")


class TestAlignAndSparsity:
    def test_align_places_observations(self):
        key = make_key()
        obs = [make_obs(key, 0.0, 1.0), make_obs(key, 2.0, 3.0)]
        out = align_observations(obs, key, T0, HOUR, 4)
        assert out.values[0] == 1.0
        assert np.isnan(out.values[1])
        assert out.values[2] == 3.0
        assert np.isnan(out.values[3])

    def test_six_of_ten_missing_dropped(self):
        values = [1.0, NAN, NAN, NAN, NAN, NAN, NAN, 2.0, 3.0, 4.0]
        retained, dropped = drop_sparse([aligned(values)])
        assert retained == []
        assert dropped[0][1] == pytest.approx(0.6)

    def test_exactly_half_retained(self):
        # fraction is computed between first and last present value: 5/10
        values = [1.0, NAN, NAN, NAN, NAN, NAN, 2.0, 3.0, 4.0, 5.0]
        series = aligned(values)
        assert missing_fraction(series) == pytest.approx(0.5)
        retained, dropped = drop_sparse([series])
        assert len(retained) == 1 and not dropped

    def test_no_missing_retained(self):
        retained, dropped = drop_sparse([aligned([1.0, 2.0, 3.0])])
        assert len(retained) == 1 and not dropped


class TestImputation:
    def test_midpoint(self):
        out = impute_linear(aligned([1.0, NAN, 3.0]))
        assert out.values.tolist() == [1.0, 2.0, 3.0]
        assert out.imputed_mask.tolist() == [False, True, False]

    def test_equal_spacing(self):
        out = impute_linear(aligned([1.0, NAN, NAN, 4.0]))
        assert out.values.tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_edge_hold(self):
        out = impute_linear(aligned([NAN, 5.0, 7.0]))
        assert out.values.tolist() == [5.0, 5.0, 7.0]
        out = impute_linear(aligned([3.0, 9.0, NAN]))
        assert out.values.tolist() == [3.0, 9.0, 9.0]

    def test_present_values_untouched(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=50)
        missing = rng.random(50) < 0.3
        values_masked = values.copy()
        values_masked[missing] = np.nan
        if missing.all() or missing.sum() > 48:
            pytest.skip("degenerate draw")
        out = impute_linear(aligned(values_masked))
        present = ~missing
        assert (out.values[present] == values[present]).all()
        assert (out.imputed_mask == missing).all()

    def test_too_few_present_values(self):
        with pytest.raises(UsageError):
            impute_linear(aligned([1.0, NAN, NAN]))


class TestLagMatrix:
    def test_single_series_recursive(self):
        matrix = build_lag_matrix([aligned([1.0, 2.0, 3.0, 4.0])], lags=2)
        assert matrix.X.shape == (2, 3)  # 2 lags + 1 one-hot
        np.testing.assert_allclose(matrix.X[0][:2], [2.0, 1.0])
        assert matrix.y[0] == 3.0
        np.testing.assert_allclose(matrix.X[1][:2], [3.0, 2.0])
        assert matrix.y[1] == 4.0

    def test_two_series_one_hot(self):
        a = aligned([1.0, 2.0, 3.0, 4.0], key=make_key(station="A"))
        b = aligned([1.0, 2.0, 3.0, 4.0], key=make_key(station="B"))
        matrix = build_lag_matrix([a, b], lags=2)
        assert len(matrix) == 4
        hot = matrix.X[:, 2:4]
        assert hot.sum(axis=1).tolist() == [1.0] * 4
        assert len(set(map(tuple, hot))) == 2

    def test_imputed_target_weight_zero(self):
        series = aligned([1.0, 2.0, 2.5, 4.0], mask=[False, False, True, False])
        matrix = build_lag_matrix([series], lags=1)
        # rows: t=1 (target 2.0), t=2 (target imputed), t=3 (target 4, lag imputed)
        assert matrix.weights.tolist() == [1.0, 0.0, 1.0]
        any_touch = build_lag_matrix([series], lags=1, weight_mode=WEIGHT_ANY_TOUCH)
        assert any_touch.weights.tolist() == [1.0, 0.0, 0.0]

    def test_direct_horizons(self):
        matrix = build_lag_matrix([aligned([1.0, 2.0, 3.0, 4.0, 5.0])], lags=1,
                                  horizons=(1, 2))
        # t in {1, 2, 3}: targets [y_t, y_{t+1}]
        assert matrix.y.shape == (3, 2)
        np.testing.assert_allclose(matrix.y[0], [2.0, 3.0])
        np.testing.assert_allclose(matrix.y[-1], [4.0, 5.0])

    def test_short_series_empty_matrix(self):
        matrix = build_lag_matrix([aligned([1.0, 2.0])], lags=5)
        assert len(matrix) == 0

    def test_lag_consistency_reconstruction(self):
        rng = np.random.default_rng(5)
        values = rng.normal(size=30)
        matrix = build_lag_matrix([aligned(values)], lags=3)
        for row, target in zip(matrix.X, matrix.y):
            lags = row[:3]
            t = int(np.flatnonzero(values == target)[0])
            np.testing.assert_allclose(lags, values[t - 3 : t][::-1])

    def test_exog_column_at_target_time(self):
        y = aligned([1.0, 2.0, 3.0, 4.0])
        exog_key = make_key(variable="rain", unit="mm")
        exog = aligned([10.0, 20.0, 30.0, 40.0], key=exog_key)
        matrix = build_lag_matrix([y], lags=1, exog=[exog])
        # rows t=1,2,3 -> exog at t = 20, 30, 40
        assert matrix.X[:, -1].tolist() == [20.0, 30.0, 40.0]

    def test_unimputed_missing_rejected(self):
        with pytest.raises(UsageError):
            build_lag_matrix([aligned([1.0, NAN, 3.0])], lags=1)


class TestChronoSplit:
    def _matrix(self, n):
        return build_lag_matrix([aligned(np.arange(n + 1, dtype=float))], lags=1)

    def test_100_rows(self):
        train, val, test = chrono_split(self._matrix(100))
        assert (len(train), len(val), len(test)) == (70, 10, 20)

    def test_10_rows(self):
        train, val, test = chrono_split(self._matrix(10))
        assert (len(train), len(val), len(test)) == (7, 1, 2)

    def test_101_rows_remainder_to_train(self):
        train, val, test = chrono_split(self._matrix(101))
        assert (len(train), len(val), len(test)) == (71, 10, 20)

    def test_leakage_free(self):
        a = aligned(np.arange(51, dtype=float), key=make_key(station="A"))
        b = aligned(np.arange(51, dtype=float), key=make_key(station="B"))
        matrix = build_lag_matrix([a, b], lags=1)
        train, val, test = chrono_split(matrix)
        assert train.timestamps.max() < val.timestamps.min()
        assert val.timestamps.max() < test.timestamps.min()

    def test_empty_partition_rejected(self):
        with pytest.raises(UsageError):
            chrono_split(self._matrix(3))


class TestRobustScaler:
    def test_hand_quantiles(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0], [5.0]])
        scaler = RobustScaler.fit(X)
        assert scaler.center[0] == 3.0
        assert scaler.scale[0] == 2.0  # q75=4, q25=2 with linear interpolation
        np.testing.assert_allclose(
            scaler.transform(X)[:, 0], [-1.0, -0.5, 0.0, 0.5, 1.0]
        )

    def test_constant_column(self):
        X = np.full((4, 1), 7.0)
        scaler = RobustScaler.fit(X)
        assert scaler.transform(X).tolist() == [[0.0]] * 4

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(40, 3)) * [1.0, 100.0, 1e-4]
        scaler = RobustScaler.fit(X)
        back = scaler.inverse_transform(scaler.transform(X))
        np.testing.assert_allclose(back, X, atol=1e-12)

    def test_outlier_robustness_vs_mean_scaler(self):
        rng = np.random.default_rng(21)
        x = rng.normal(size=20)
        spiked = np.append(x, 1e6)
        clean = RobustScaler.fit(x)
        dirty = RobustScaler.fit(spiked)
        robust_shift = np.abs(dirty.transform(x) - clean.transform(x)).max()

        def standardize(fit_on, apply_to):
            return (apply_to - fit_on.mean()) / fit_on.std()

        mean_shift = np.abs(standardize(spiked, x) - standardize(x, x)).max()
        assert robust_shift < mean_shift

    def test_train_only_guard(self):
        rng = np.random.default_rng(33)
        train = rng.normal(size=(70, 2))
        test = rng.normal(loc=5.0, size=(30, 2))
        train_only = RobustScaler.fit(train)
        refit_with_test = RobustScaler.fit(np.vstack([train, test]))
        assert not np.allclose(train_only.center, refit_with_test.center)
