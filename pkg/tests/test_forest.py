"""Interval features vs closed-form oracle, tree/forest training contracts,
prediction, and model persistence."""

import numpy as np
import pytest

from oracles import interval_stats_direct
from seizurekit import (
    ForestParams,
    Interval,
    interval_features,
    load_model,
    predict,
    predict_stream,
    save_model,
    train,
)
from seizurekit.errors import (
    FeatureShapeError,
    IntervalBoundsError,
    ModelIntegrityError,
    ModelVersionError,
    NoPositiveClassError,
)
from seizurekit.forest import Tree, batch_interval_features, predict_batch
from seizurekit.spectral import FeatureWindowSet


def feature_set(features, labels, t0=1704067200, stride=10):
    features = np.asarray(features, dtype=np.float64)
    n = features.shape[0]
    return FeatureWindowSet(
        features=features,
        start_times=t0 + stride * np.arange(n, dtype=np.int64),
        labels=np.asarray(labels, dtype=np.uint8),
        window_s=60,
        stride_s=stride,
        bin_hz=1 / 60,
    )


def separable_set(rng, n=400, n_bins=100, threshold=5.0):
    """Class 1 iff the mean of bins [0, 10) exceeds the threshold."""
    x = rng.uniform(0, 4, size=(n, n_bins))
    hot = rng.random(n) < 0.5
    x[hot, :10] += 4.0  # pushes the low-bin mean above 5 for ~half the rows
    labels = (x[:, :10].mean(axis=1) > threshold).astype(np.uint8)
    return feature_set(x, labels)


class TestIntervalFeatures:
    def test_exact_line(self):
        mean, std, slope = interval_features(np.array([0.0, 2.0, 4.0, 6.0]), Interval(0, 4))
        assert mean == pytest.approx(3.0)
        assert slope == pytest.approx(2.0)
        assert std == pytest.approx(np.sqrt(5.0))  # population std

    def test_constant_series(self):
        mean, std, slope = interval_features(np.full(17, 3.25), Interval(2, 10))
        assert (mean, std, slope) == (3.25, 0.0, 0.0)

    def test_length_one_interval(self):
        mean, std, slope = interval_features(np.array([5.0, 7.0, 9.0]), Interval(1, 1))
        assert (mean, std, slope) == (7.0, 0.0, 0.0)

    def test_oracle_200_random_cases(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 400))
            series = rng.standard_normal(n) * float(rng.uniform(0.1, 5))
            length = int(rng.integers(1, n + 1))
            start = int(rng.integers(0, n - length + 1))
            got = interval_features(series, Interval(start, length))
            want = interval_stats_direct(series, start, length)
            assert np.allclose(got, want, atol=1e-9, rtol=0)

    def test_bounds_error(self):
        with pytest.raises(IntervalBoundsError):
            interval_features(np.zeros(10), Interval(8, 5))
        with pytest.raises(IntervalBoundsError):
            Interval(-1, 3)

    def test_batch_matches_singles(self, rng):
        rows = rng.standard_normal((7, 50))
        intervals = np.array([[0, 50], [10, 3], [45, 5], [20, 1]])
        batch = batch_interval_features(rows, intervals)
        for r in range(7):
            for j, (s, l) in enumerate(intervals):
                single = interval_features(rows[r], Interval(int(s), int(l)))
                assert np.allclose(batch[r, 3 * j : 3 * j + 3], single, atol=1e-12)


class TestTraining:
    def test_separable_training_accuracy(self, rng):
        fs = separable_set(rng)
        model = train(fs, ForestParams(n_trees=25, seed=1))
        probs = predict_batch(model, fs.features)
        assert np.mean((probs >= 0.5) == fs.labels) == 1.0

    def test_seed_determinism_byte_identical(self, rng, tmp_path):
        fs = separable_set(rng, n=120)
        a = tmp_path / "a.skf"
        b = tmp_path / "b.skf"
        save_model(train(fs, ForestParams(n_trees=10, seed=9)), a)
        save_model(train(fs, ForestParams(n_trees=10, seed=9)), b)
        assert a.read_bytes() == b.read_bytes()
        c = tmp_path / "c.skf"
        save_model(train(fs, ForestParams(n_trees=10, seed=10)), c)
        assert a.read_bytes() != c.read_bytes()

    def test_paper_shaped_features_contract(self, rng):
        x = rng.standard_normal((30, 15001)) ** 2
        labels = np.r_[np.ones(15, dtype=np.uint8), np.zeros(15, dtype=np.uint8)]
        model = train(feature_set(x, labels), ForestParams(n_trees=5, seed=2))
        probs = predict_batch(model, x)
        assert np.all((probs >= 0.0) & (probs <= 1.0))

    def test_single_class_rejected(self, rng):
        x = rng.standard_normal((20, 30))
        with pytest.raises(NoPositiveClassError):
            train(feature_set(x, np.zeros(20)), ForestParams(n_trees=2))
        with pytest.raises(NoPositiveClassError):
            train(feature_set(x, np.ones(20)), ForestParams(n_trees=2))

    def test_series_too_short(self, rng):
        x = rng.standard_normal((20, 2))
        labels = np.r_[np.ones(10), np.zeros(10)]
        with pytest.raises(IntervalBoundsError):
            train(feature_set(x, labels), ForestParams(n_trees=2, min_interval_len=3))

    def test_memorization_single_tree(self, rng):
        # unlimited depth + all-distinct rows: training accuracy must be 1.0
        x = rng.standard_normal((60, 12))
        labels = rng.integers(0, 2, size=60)
        labels[0], labels[1] = 1, 0  # both classes present
        fs = feature_set(x, labels)
        model = train(fs, ForestParams(n_trees=1, seed=3, min_interval_len=3))
        probs = predict_batch(model, x)
        assert np.array_equal(probs >= 0.5, labels.astype(bool))
        assert set(np.unique(probs)) <= {0.0, 1.0}  # pure leaves

    def test_interval_count_default_is_sqrt(self, rng):
        fs = separable_set(rng, n=60, n_bins=200)
        model = train(fs, ForestParams(n_trees=2, seed=0))
        assert model.trees[0].intervals.shape[0] == int(np.sqrt(200))

    def test_intervals_valid_for_feature_len(self, rng):
        fs = separable_set(rng, n=60, n_bins=77)
        model = train(fs, ForestParams(n_trees=20, seed=4))
        for tree in model.trees:
            assert np.all(tree.intervals[:, 0] >= 0)
            assert np.all(tree.intervals[:, 1] >= 3)
            assert np.all(tree.intervals.sum(axis=1) <= 77)

    def test_leaves_have_training_samples(self, rng):
        fs = separable_set(rng, n=80)
        model = train(fs, ForestParams(n_trees=5, seed=5))
        for tree in model.trees:
            leaves = tree.feature < 0
            assert np.all((tree.n_pos[leaves] + tree.n_neg[leaves]) >= 1)

    def test_max_depth_and_min_samples_leaf(self, rng):
        fs = separable_set(rng, n=100)
        stump = train(fs, ForestParams(n_trees=3, seed=6, max_depth=1))
        for tree in stump.trees:
            assert tree.n_nodes <= 3
        chunky = train(fs, ForestParams(n_trees=3, seed=6, min_samples_leaf=10))
        for tree in chunky.trees:
            leaves = tree.feature < 0
            assert np.all((tree.n_pos[leaves] + tree.n_neg[leaves]) >= 10)


class TestPredict:
    def test_probability_bounds_and_vote_arithmetic(self):
        # two stub trees with leaf fractions 1.0 and 0.5 -> 0.75
        def leaf_tree(pos, neg):
            return Tree(
                intervals=np.array([[0, 3]], dtype=np.int64),
                feature=np.array([-1], dtype=np.int32),
                threshold=np.zeros(1),
                left=np.array([-1], dtype=np.int32),
                right=np.array([-1], dtype=np.int32),
                n_pos=np.array([pos], dtype=np.uint32),
                n_neg=np.array([neg], dtype=np.uint32),
            )

        from seizurekit.forest import ForestModel

        model = ForestModel(
            trees=[leaf_tree(4, 0), leaf_tree(2, 2)],
            params=ForestParams(n_trees=2, seed=0),
            feature_len=8,
            modality="ecog",
        )
        assert predict(model, np.zeros(8)) == pytest.approx(0.75)
        model_neg = ForestModel(
            trees=[leaf_tree(0, 5)],
            params=ForestParams(n_trees=1, seed=0),
            feature_len=8,
            modality="ecog",
        )
        assert predict(model_neg, np.ones(8)) == 0.0

    def test_monotone_vote_property(self, rng):
        fs = separable_set(rng, n=80)
        model = train(fs, ForestParams(n_trees=7, seed=8))
        x = fs.features[13]
        before = predict(model, x)
        always_pos = Tree(
            intervals=np.array([[0, 3]], dtype=np.int64),
            feature=np.array([-1], dtype=np.int32),
            threshold=np.zeros(1),
            left=np.array([-1], dtype=np.int32),
            right=np.array([-1], dtype=np.int32),
            n_pos=np.array([1], dtype=np.uint32),
            n_neg=np.array([0], dtype=np.uint32),
        )
        model.trees.append(always_pos)
        model.params = ForestParams(n_trees=8, seed=8)
        after = predict(model, x)
        assert after >= before

    def test_shape_error(self, rng):
        fs = separable_set(rng, n=60)
        model = train(fs, ForestParams(n_trees=2, seed=0))
        with pytest.raises(FeatureShapeError):
            predict(model, np.zeros(99))

    def test_held_out_auc_on_separable_set(self, rng):
        from seizurekit import rank_auc

        fs = separable_set(rng, n=500)
        split = 400
        train_fs = feature_set(fs.features[:split], fs.labels[:split])
        model = train(train_fs, ForestParams(n_trees=50, seed=12))
        probs = predict_batch(model, fs.features[split:])
        assert rank_auc(probs, fs.labels[split:]) >= 0.95

    def test_predict_stream_contract(self, rng, tmp_path):
        from seizurekit import read_prediction_stream, write_prediction_stream

        fs = separable_set(rng, n=50)
        model = train(fs, ForestParams(n_trees=10, seed=2))
        stream = predict_stream(model, fs)
        assert len(stream) == 50
        assert np.array_equal(stream.timestamps, fs.start_times)
        assert np.all(np.diff(stream.timestamps) == 10)
        path = tmp_path / "s.csv"
        write_prediction_stream(stream, path)
        assert read_prediction_stream(path, "ecog") == stream


class TestPersistence:
    def _model(self, rng, **kw):
        fs = separable_set(rng, n=80)
        return train(fs, ForestParams(n_trees=6, seed=21, **kw))

    def test_roundtrip_identical_predictions(self, rng, tmp_path):
        model = self._model(rng)
        path = tmp_path / "m.skf"
        save_model(model, path)
        back = load_model(path)
        x = rng.uniform(0, 8, size=(100, 100))
        assert np.array_equal(predict_batch(model, x), predict_batch(back, x))
        assert back.params == model.params
        assert back.modality == model.modality
        assert back.feature_len == model.feature_len

    def test_truncated_file(self, rng, tmp_path):
        model = self._model(rng)
        path = tmp_path / "m.skf"
        save_model(model, path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) // 2])
        with pytest.raises(ModelIntegrityError):
            load_model(path)

    def test_corrupted_byte(self, rng, tmp_path):
        model = self._model(rng)
        path = tmp_path / "m.skf"
        save_model(model, path)
        raw = bytearray(path.read_bytes())
        raw[60] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(ModelIntegrityError):
            load_model(path)

    def test_version_bump_rejected(self, rng, tmp_path):
        import hashlib

        model = self._model(rng)
        path = tmp_path / "m.skf"
        save_model(model, path)
        raw = bytearray(path.read_bytes())[:-32]
        raw[4:8] = (2).to_bytes(4, "little")  # version field
        raw += hashlib.sha256(bytes(raw)).digest()  # keep the checksum valid
        path.write_bytes(bytes(raw))
        with pytest.raises(ModelVersionError):
            load_model(path)

    def test_not_a_model_file(self, tmp_path):
        path = tmp_path / "m.skf"
        path.write_bytes(b"garbage that is not a model at all" * 3)
        with pytest.raises(ModelIntegrityError):
            load_model(path)
