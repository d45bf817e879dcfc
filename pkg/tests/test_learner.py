import numpy as np
import pytest

from cascadekit.errors import (
    EmptyInputError,
    MissingFeatureError,
    NonFiniteInputError,
    SingleClassError,
    TooFewExamplesError,
)
from cascadekit.learner import (
    Model,
    auc,
    cross_validate,
    evaluate_cluster,
    f1,
    loss_and_gradient,
    mrr,
    predict_proba,
    stratified_folds,
    train,
)
from cascadekit.tasks import ClusterInstance, ClusterMember
from cascadekit.features import FeatureVector


def separable_1d(rng, n=200, gap=3.0):
    x = np.concatenate([rng.normal(-gap, 0.5, n // 2), rng.normal(gap, 0.5, n // 2)])
    y = np.array([0.0] * (n // 2) + [1.0] * (n // 2))
    return x.reshape(-1, 1), y


class TestTrain:
    def test_separable_training_accuracy(self, rng):
        X, y = separable_1d(rng)
        model = train(X, y, lam=0.01)
        scores = np.array([predict_proba(model, row) for row in X])
        assert np.mean((scores >= 0.5) == y) == 1.0
        # and every training point sits on its own side of 0.5
        assert np.all((scores >= 0.5) == (y == 1))

    def test_stopping_contract(self, rng):
        X, y = separable_1d(rng, n=60)
        model = train(X, y)
        assert model.converged or model.iterations == 10_000

    def test_random_labels_near_chance(self, rng):
        X = rng.normal(size=(10_000, 3))
        y = (rng.random(10_000) < 0.5).astype(float)
        metrics = cross_validate(X, y, folds=10, lam=0.01, seed=0)
        assert 0.47 <= metrics.accuracy <= 0.53

    def test_single_class_rejected(self, rng):
        X = rng.normal(size=(10, 2))
        with pytest.raises(SingleClassError):
            train(X, np.ones(10))

    def test_non_finite_rejected(self):
        X = np.array([[1.0], [np.nan]])
        with pytest.raises(NonFiniteInputError):
            train(X, np.array([0.0, 1.0]))

    def test_zero_variance_columns_dropped_and_recorded(self, rng):
        X, y = separable_1d(rng, n=40)
        X = np.hstack([X, np.full((40, 1), 7.0)])
        model = train(X, y, feature_names=["signal", "constant"])
        assert model.dropped == ("constant",)
        assert model.feature_names == ("signal",)
        assert all(s > 0 for s in model.stds.values())

    def test_deterministic_regardless_of_seed(self, rng):
        X, y = separable_1d(rng, n=100)
        a = train(X, y, seed=1)
        b = train(X, y, seed=2)
        assert a.weights == b.weights
        assert a.bias == b.bias

    def test_lambda_monotone_data_loss(self, rng):
        X = rng.normal(size=(300, 4))
        w_true = np.array([1.0, -2.0, 0.5, 0.0])
        y = (rng.random(300) < 1 / (1 + np.exp(-(X @ w_true)))).astype(float)
        losses = []
        for lam in (1.0, 0.1, 0.01):
            model = train(X, y, lam=lam)
            w = np.array([model.weights[n] for n in model.feature_names])
            mu = np.array([model.means[n] for n in model.feature_names])
            sd = np.array([model.stds[n] for n in model.feature_names])
            Xs = (X - mu) / sd
            data_loss, _, _ = loss_and_gradient(w, model.bias, Xs, y, 0.0)
            losses.append(data_loss)
        assert losses[0] >= losses[1] >= losses[2]


class TestGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(5, 50))
            d = int(rng.integers(1, 10))
            X = rng.normal(size=(n, d))
            y = (rng.random(n) < 0.5).astype(float)
            if np.unique(y).size < 2:
                continue
            w = rng.normal(size=d)
            b = float(rng.normal())
            lam = float(rng.random())
            _, grad_w, grad_b = loss_and_gradient(w, b, X, y, lam)
            eps = 1e-6
            for j in range(d):
                wp, wm = w.copy(), w.copy()
                wp[j] += eps
                wm[j] -= eps
                numeric = (
                    loss_and_gradient(wp, b, X, y, lam)[0]
                    - loss_and_gradient(wm, b, X, y, lam)[0]
                ) / (2 * eps)
                assert abs(numeric - grad_w[j]) / max(abs(grad_w[j]), 1e-8) < 1e-5
            numeric_b = (
                loss_and_gradient(w, b + eps, X, y, lam)[0]
                - loss_and_gradient(w, b - eps, X, y, lam)[0]
            ) / (2 * eps)
            assert abs(numeric_b - grad_b) / max(abs(grad_b), 1e-8) < 1e-5


class TestPredictProba:
    def test_zero_model_gives_half(self):
        model = Model(
            feature_names=("a",),
            weights={"a": 0.0},
            bias=0.0,
            means={"a": 0.0},
            stds={"a": 1.0},
            dropped=(),
            lam=0.01,
            seed=0,
            iterations=0,
            final_loss=0.0,
            converged=True,
        )
        assert predict_proba(model, {"a": 3.0}) == 0.5

    def test_large_bias_saturates(self):
        model = Model(
            feature_names=(),
            weights={},
            bias=50.0,
            means={},
            stds={},
            dropped=(),
            lam=0.01,
            seed=0,
            iterations=0,
            final_loss=0.0,
            converged=True,
        )
        assert predict_proba(model, {}) > 0.999

    def test_missing_feature(self):
        model = Model(
            feature_names=("a", "b"),
            weights={"a": 1.0, "b": 1.0},
            bias=0.0,
            means={"a": 0.0, "b": 0.0},
            stds={"a": 1.0, "b": 1.0},
            dropped=(),
            lam=0.01,
            seed=0,
            iterations=0,
            final_loss=0.0,
            converged=True,
        )
        with pytest.raises(MissingFeatureError):
            predict_proba(model, {"a": 1.0})

    def test_feature_vector_missing_indicators_available(self, rng):
        # A model trained with indicator columns scores FeatureVectors directly.
        names = ["x"]
        raws = []
        labels = []
        for i in range(40):
            missing = i % 4 == 0
            raws.append({"x": None if missing else float(rng.normal())})
            labels.append(1.0 if (not missing and raws[-1]["x"] > 0) else 0.0)
        vectors = [FeatureVector(names, raw) for raw in raws]
        X = np.array(
            [[v.values["x"], 1.0 if "x" in v.missing else 0.0] for v in vectors]
        )
        model = train(X, np.array(labels), feature_names=["x", "x_missing"])
        p = predict_proba(model, vectors[1])
        assert 0.0 <= p <= 1.0


class TestCrossValidate:
    def test_separable_perfect(self, rng):
        X, y = separable_1d(rng, n=120, gap=4.0)
        metrics = cross_validate(X, y, folds=10, seed=0)
        assert metrics.accuracy == 1.0
        assert metrics.auc == 1.0
        assert sum(metrics.fold_sizes) == 120

    def test_label_permutation_null(self, rng):
        X, y = separable_1d(rng, n=5000, gap=2.0)
        y_perm = y[rng.permutation(y.size)]
        metrics = cross_validate(X, y_perm, folds=10, seed=0)
        assert 0.47 <= metrics.auc <= 0.53

    def test_same_seed_bit_identical(self, rng):
        X = rng.normal(size=(200, 5))
        y = (rng.random(200) < 0.5).astype(float)
        a = cross_validate(X, y, folds=10, seed=9)
        b = cross_validate(X, y, folds=10, seed=9)
        assert a == b

    def test_standardization_absorbs_column_scale(self, rng):
        X = rng.normal(size=(150, 3))
        w_true = np.array([2.0, -1.0, 0.3])
        y = (rng.random(150) < 1 / (1 + np.exp(-(X @ w_true)))).astype(float)
        base = cross_validate(X, y, folds=5, seed=2)
        scaled = X.copy()
        scaled[:, 1] *= 4.0  # power of two: z-scores identical bit for bit
        again = cross_validate(scaled, y, folds=5, seed=2)
        assert base == again

    def test_too_few_examples(self, rng):
        X = rng.normal(size=(5, 2))
        y = np.array([0, 1, 0, 1, 0], dtype=float)
        with pytest.raises(TooFewExamplesError):
            cross_validate(X, y, folds=10)

    def test_stratified_assignment_balance(self, rng):
        y = np.array([1.0] * 30 + [0.0] * 70)
        assignment = stratified_folds(y, 10, seed=4)
        for fold in range(10):
            fold_labels = y[assignment == fold]
            assert np.sum(fold_labels == 1) == 3
            assert np.sum(fold_labels == 0) == 7


class TestAuc:
    def test_perfect(self):
        assert auc([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0

    def test_all_ties(self):
        assert auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5

    def test_half(self):
        assert auc([0.8, 0.6, 0.4], [1, 0, 1]) == 0.5

    def test_monotone_transform_invariance(self, rng):
        scores = rng.random(100)
        labels = (rng.random(100) < 0.4).astype(float)
        base = auc(scores, labels)
        assert auc(np.exp(5 * scores), labels) == base
        assert auc(2 * scores - 1, labels) == base

    def test_single_class(self):
        with pytest.raises(SingleClassError):
            auc([0.3, 0.4], [1, 1])


class TestF1:
    def test_perfect(self):
        assert f1([1, 0, 1], [1, 0, 1]) == 1.0

    def test_half(self):
        assert f1([1, 1, 0], [1, 0, 1]) == 0.5

    def test_no_predicted_positives(self):
        assert f1([0, 0, 0], [1, 0, 1]) == 0.0

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            f1([], [])


class TestMrr:
    def test_all_first(self):
        assert mrr([1, 1, 1]) == 1.0

    def test_all_second(self):
        assert mrr([2, 2]) == 0.5

    def test_mixed(self):
        assert mrr([1, 2, 4]) == pytest.approx(7 / 12, abs=1e-12)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            mrr([])


def _instance(cluster_id, member_values, winner_index):
    members = tuple(
        ClusterMember(
            cascade_id=f"{cluster_id}m{i}",
            features=FeatureVector(["x"], {"x": v}),
            final_size=10 if i == winner_index else 5,
            epoch=0.0,
        )
        for i, v in enumerate(member_values)
    )
    return ClusterInstance(cluster_id, members, winner_index)


def _model_weight_on_x(weight):
    return Model(
        feature_names=("x",),
        weights={"x": weight},
        bias=0.0,
        means={"x": 0.0},
        stds={"x": 1.0},
        dropped=("x_missing",),
        lam=0.01,
        seed=0,
        iterations=1,
        final_loss=0.0,
        converged=True,
    )


class TestEvaluateCluster:
    def test_winner_scored_highest(self):
        instances = [
            _instance("a", [0.1, 0.9, 0.2], 1),
            _instance("b", [0.8, 0.3, 0.1], 0),
        ]
        top1, mean_rr = evaluate_cluster(_model_weight_on_x(1.0), instances)
        assert top1 == 1.0
        assert mean_rr == 1.0

    def test_winner_always_second(self):
        instances = [
            _instance("a", [0.9, 0.5, 0.1], 1),
            _instance("b", [0.9, 0.5, 0.1], 1),
        ]
        top1, mean_rr = evaluate_cluster(_model_weight_on_x(1.0), instances)
        assert top1 == 0.0
        assert mean_rr == 0.5

    def test_constant_scores_fall_back_to_id_order(self):
        # Ten members, identical scores: rank of the winner is its position
        # in cascade_id order, computed exactly.
        instances = [_instance("a", [0.5] * 10, 3)]
        top1, mean_rr = evaluate_cluster(_model_weight_on_x(0.0), instances)
        assert top1 == 0.0
        assert mean_rr == pytest.approx(1 / 4)  # ids a_m0..a_m9: winner m3 is 4th

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            evaluate_cluster(_model_weight_on_x(1.0), [])
