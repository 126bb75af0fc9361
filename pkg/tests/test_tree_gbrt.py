from __future__ import annotations

import numpy as np
import pytest

from lagoontwin.errors import UsageError
from lagoontwin.learners.gbrt import GbrtModel, HyperParams, fit_gbrt
from lagoontwin.learners.linear import LinearModel, NaivePersistence, fit_linear
from lagoontwin.learners.model_io import dump_model, load_model
from lagoontwin.learners.tree import fit_tree

from .oracle_tree import brute_force_training_loss


def training_loss(model_or_tree, X, y, w) -> float:
    pred = model_or_tree.predict(X)
    return float((w * (y - pred) ** 2).sum())


class TestTree:
    def test_depth_zero_is_weighted_mean(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([1.0, 2.0, 6.0])
        w = np.array([1.0, 1.0, 2.0])
        tree = fit_tree(X, y, w, max_depth=0)
        expected = (1 + 2 + 12) / 4
        assert tree.predict(X).tolist() == [expected] * 3

    def test_two_points_exact_fit(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([0.0, 1.0])
        tree = fit_tree(X, y, np.ones(2), max_depth=1)
        assert tree.predict(X).tolist() == [0.0, 1.0]

    def test_zero_weight_rows_excluded(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([0.0, 100.0])
        tree = fit_tree(X, y, np.array([1.0, 0.0]), max_depth=0)
        assert tree.predict(X).tolist() == [0.0, 0.0]

    def test_all_zero_weights_rejected(self):
        with pytest.raises(UsageError):
            fit_tree(np.zeros((2, 1)), np.zeros(2), np.zeros(2), max_depth=1)

    def test_min_samples_leaf_respected(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(20, 2))
        y = rng.normal(size=20)
        tree = fit_tree(X, y, np.ones(20), max_depth=4, min_samples_leaf=5)
        # every leaf must have received >= 5 training rows
        rows_per_leaf: dict[int, int] = {}
        for row in X:
            node_id = 0
            while tree.nodes[node_id].feature >= 0:
                node = tree.nodes[node_id]
                node_id = node.left if row[node.feature] <= node.threshold else node.right
            rows_per_leaf[node_id] = rows_per_leaf.get(node_id, 0) + 1
        assert min(rows_per_leaf.values()) >= 5

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(101)
        for _ in range(40):
            n = int(rng.integers(4, 33))
            d = int(rng.integers(1, 3))
            X = rng.normal(size=(n, d))
            y = rng.normal(size=n)
            w = np.where(rng.random(n) < 0.15, 0.0, rng.uniform(0.5, 2.0, size=n))
            if (w > 0).sum() < 2:
                continue
            depth = int(rng.integers(1, 3))
            tree = fit_tree(X, y, w, max_depth=depth)
            got = training_loss(tree, X, y, w)
            want = brute_force_training_loss(X, y, w, max_depth=depth)
            assert got == pytest.approx(want, abs=1e-9)


class TestGbrt:
    def test_zero_trees_predicts_weighted_mean(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([2.0, 4.0])
        model = fit_gbrt(X, y, np.ones(2), HyperParams(n_trees=0))
        assert model.predict(X).tolist() == [3.0, 3.0]

    def test_exact_interpolation_on_distinct_points(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([1.0, -2.0, 0.5, 3.0])
        params = HyperParams(n_trees=40, learning_rate=1.0, max_depth=2)
        model = fit_gbrt(X, y, np.ones(4), params)
        assert training_loss(model, X, y, np.ones(4)) < 1e-12

    def test_training_loss_non_increasing(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(60, 3))
        y = rng.normal(size=60)
        model = fit_gbrt(X, y, np.ones(60), HyperParams(n_trees=50, learning_rate=0.3))
        losses = np.array(model.training_loss)
        assert (np.diff(losses) <= 1e-12).all()

    def test_more_trees_never_increase_training_loss(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(40, 2))
        y = rng.normal(size=40)
        small = fit_gbrt(X, y, np.ones(40), HyperParams(n_trees=20, seed=1))
        large = fit_gbrt(X, y, np.ones(40), HyperParams(n_trees=40, seed=1))
        assert large.training_loss[-1] <= small.training_loss[-1] + 1e-12

    def test_determinism(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(50, 2))
        y = rng.normal(size=50)
        a = fit_gbrt(X, y, np.ones(50), HyperParams(n_trees=15, seed=7))
        b = fit_gbrt(X, y, np.ones(50), HyperParams(n_trees=15, seed=7))
        assert (a.predict(X) == b.predict(X)).all()

    def test_target_scaling_scales_predictions(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([1.0, -2.0, 0.5, 3.0])
        params = HyperParams(n_trees=30, learning_rate=1.0, max_depth=2)
        base = fit_gbrt(X, y, np.ones(4), params)
        scaled = fit_gbrt(X, y * 7.0, np.ones(4), params)
        np.testing.assert_allclose(scaled.predict(X), 7.0 * base.predict(X), rtol=1e-12)


class TestLinear:
    def test_recovers_linear_relation(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(100, 2))
        y = 3.0 * X[:, 0] - 1.5 * X[:, 1] + 0.25
        model = fit_linear(X, y, np.ones(100))
        np.testing.assert_allclose(model.coef, [3.0, -1.5], atol=1e-10)
        assert model.intercept == pytest.approx(0.25, abs=1e-10)

    def test_zero_weight_rows_ignored(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([0.0, 1.0, 500.0])
        w = np.array([1.0, 1.0, 0.0])
        model = fit_linear(X, y, w)
        assert model.predict(np.array([[2.0]]))[0] == pytest.approx(2.0, abs=1e-9)

    def test_naive_persistence(self):
        X = np.array([[5.0, 1.0], [7.0, 2.0]])
        assert NaivePersistence().predict(X).tolist() == [5.0, 7.0]


class TestModelIO:
    def test_gbrt_round_trip_bit_exact(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(40, 2))
        y = rng.normal(size=40)
        model = fit_gbrt(X, y, np.ones(40), HyperParams(n_trees=10, max_depth=3))
        loaded = load_model(dump_model(model))
        assert isinstance(loaded, GbrtModel)
        assert (loaded.predict(X) == model.predict(X)).all()
        assert loaded.params == model.params
        assert dump_model(loaded) == dump_model(model)

    def test_linear_round_trip(self):
        model = LinearModel(coef=np.array([1.5, -2.25]), intercept=0.125)
        loaded = load_model(dump_model(model))
        assert isinstance(loaded, LinearModel)
        assert loaded.coef.tolist() == [1.5, -2.25]
        assert loaded.intercept == 0.125

    def test_bad_magic_rejected(self):
        from lagoontwin.errors import IntegrityError

        with pytest.raises(IntegrityError):
            load_model(b"NOPE" + b"\x00" * 16)
