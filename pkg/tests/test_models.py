"""
The ten model kinds behind `axiscascade.models.train`.
"""

import logging
import pickle

import numpy as np
import pytest

from axiscascade.core.errors import (
    DimensionMismatchError,
    HyperparameterError,
    SingleClassError,
    ValidationError,
)
from axiscascade.models import ModelSpec, get_kind_names, predict, score, train
from axiscascade.models.kinds import mlp

from _fixtures import separable

# Small enough to keep the whole parametrized run fast.
FAST = {
    "rf": {"n_trees": 20},
    "gboost": {"n_rounds": 50},
    "mlp": {"epochs": 100},
}


def test_all_kinds_registered():
    assert get_kind_names() == (
        "dtree",
        "gboost",
        "gnb",
        "knn",
        "lr",
        "mlp",
        "rf",
        "ridge",
        "sgd_linear",
        "svm_linear",
    )


@pytest.mark.parametrize("kind", get_kind_names())
def test_separable_task(kind):
    X, y = separable(400, seed=0)
    X_test, y_test = separable(400, seed=1)
    model = train(ModelSpec(kind, FAST.get(kind, {}), seed=0), X, y)
    accuracy = np.mean(predict(model, X_test) == y_test)
    assert accuracy >= 0.95
    scores = score(model, X_test)
    assert scores.min() >= 0.0 and scores.max() <= 1.0
    assert np.array_equal(predict(model, X_test), (scores >= 0.5).astype(int))
    assert model.input_dim == 2
    assert "epochs" in model.metadata and "final_loss" in model.metadata


@pytest.mark.parametrize("kind", get_kind_names())
def test_same_seed_same_model(kind):
    X, y = separable(120, dim=3, seed=2, margin=0.2)
    spec = ModelSpec(kind, FAST.get(kind, {}), seed=5)
    a, b = train(spec, X, y), train(spec, X, y)
    assert np.array_equal(score(a, X), score(b, X))


@pytest.mark.parametrize("kind", ("lr", "ridge", "svm_linear", "dtree", "mlp"))
def test_discriminative_kinds_need_both_classes(kind):
    with pytest.raises(SingleClassError):
        train(ModelSpec(kind), np.zeros((5, 2)) + np.arange(5)[:, None], np.ones(5))


@pytest.mark.parametrize("kind", ("gnb", "knn"))
def test_permissive_kinds_score_the_single_class(kind):
    X = np.arange(10.0).reshape(5, 2)
    model = train(ModelSpec(kind, {"k": 3} if kind == "knn" else {}), X, np.ones(5))
    assert score(model, X).tolist() == [1.0] * 5


def test_knn_clamps_k(caplog):
    X, y = separable(6, seed=0)
    with caplog.at_level(logging.WARNING):
        model = train(ModelSpec("knn", {"k": 50}), X, y)
    assert "clamped" in caplog.text
    assert score(model, X) == pytest.approx([y.mean()] * 6)


def test_input_validation():
    X, y = separable(20)
    model = train(ModelSpec("lr"), X, y)
    with pytest.raises(DimensionMismatchError):
        score(model, np.zeros((3, 5)))
    assert score(model, np.zeros((0, 2))).shape == (0,)
    with pytest.raises(ValidationError):
        train(ModelSpec("lr"), X, y + 1)
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValidationError):
        train(ModelSpec("lr"), bad, y)


@pytest.mark.parametrize(
    "kind,hyperparams",
    (
        ("knn", {"k": 0}),
        ("knn", {"k": 2.5}),
        ("rf", {"feature_fraction": 1.5}),
        ("rf", {"bootstrap": "yes"}),
        ("mlp", {"learning_rate": -0.1}),
        ("lr", {"n_trees": 10}),
        ("warp", {}),
    ),
)
def test_bad_specs(kind, hyperparams):
    with pytest.raises(HyperparameterError):
        ModelSpec(kind, hyperparams)


def test_spec_round_trips():
    spec = ModelSpec("rf", {"n_trees": 5, "max_depth": 2}, seed=3)
    assert ModelSpec.from_dict(spec.as_dict()) == spec
    assert pickle.loads(pickle.dumps(spec)) == spec
    assert spec.tag == "rf(max_depth=2,n_trees=5)"
    assert spec.resolved_hyperparams["bootstrap"] is True


@pytest.mark.parametrize("shrinkage", (0.1, 0.3))
def test_gboost_loss_never_increases(shrinkage):
    X, y = separable(200, dim=3, seed=4, margin=0.0)
    model = train(ModelSpec("gboost", {"n_rounds": 40, "shrinkage": shrinkage}), X, y)
    history = np.array(model.metadata["loss_history"])
    assert len(history) == 41
    assert np.all(np.diff(history) <= 0.0)
    assert history[-1] < history[0]


def noisy_task(n, seed, flip=0.2):
    """A diagonal boundary over two of five features, with labels flipped."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 5))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    flipped = rng.random(n) < flip
    y[flipped] = 1 - y[flipped]
    return X, y


@pytest.mark.slow
def test_forest_beats_one_tree_on_noisy_data():
    forest, tree = [], []
    for seed in range(10):
        X, y = noisy_task(300, seed)
        X_test, y_test = noisy_task(1000, seed + 100, flip=0.0)
        for kind, scores in (("rf", forest), ("dtree", tree)):
            model = train(ModelSpec(kind, seed=seed), X, y)
            scores.append(np.mean(predict(model, X_test) == y_test))
    assert np.mean(forest) >= np.mean(tree)


def test_lr_loss_beats_the_constant_model():
    X, y = separable(200, seed=5, margin=0.0)
    model = train(ModelSpec("lr"), X, y)
    p = y.mean()
    constant = -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))
    assert model.metadata["final_loss"] < constant


@pytest.mark.parametrize("l2", (0.0, 0.01))
def test_mlp_gradient_matches_finite_differences(l2):
    rng = np.random.default_rng(6)
    X = rng.normal(size=(10, 4))
    y = (rng.random(10) < 0.5).astype(float)
    params = mlp.init_params(4, 8, np.random.default_rng(7))
    _, grads = mlp.loss_and_grad(params, X, y, l2)
    eps = 1e-6
    for name, value in params.items():
        numeric = np.zeros_like(value)
        for i in np.ndindex(value.shape):
            old = value[i]
            value[i] = old + eps
            plus = mlp.loss_and_grad(params, X, y, l2)[0]
            value[i] = old - eps
            minus = mlp.loss_and_grad(params, X, y, l2)[0]
            value[i] = old
            numeric[i] = (plus - minus) / (2 * eps)
        denom = max(np.linalg.norm(numeric) + np.linalg.norm(grads[name]), 1e-12)
        assert np.linalg.norm(numeric - grads[name]) / denom < 1e-4, name
