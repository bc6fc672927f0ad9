"""
SMOTE oversampling and Tomek-link cleaning.
"""

import logging

import numpy as np
import pytest

from axiscascade.core.errors import ResampleError
from axiscascade.resample import (
    ResampleConfig,
    apply_resampling,
    smote,
    tomek_links,
    tomek_remove,
)


def imbalanced(n_major=100, n_minor=20, dim=3, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(size=(n_major, dim)), rng.normal(2, 1, (n_minor, dim))])
    y = np.r_[np.zeros(n_major, int), np.ones(n_minor, int)]
    return X, y


def distance_to_segment(p, a, b):
    ab = b - a
    u = np.clip(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
    return np.linalg.norm(p - (a + u * ab))


@pytest.mark.parametrize("ratio,expected", ((1.0, 100), (0.5, 50), (0.2, 20)))
def test_smote_reaches_the_target(ratio, expected):
    X, y = imbalanced()
    Xs, ys = smote(X, y, ResampleConfig("smote", ratio=ratio))
    assert (ys == 1).sum() == expected
    assert (ys == 0).sum() == 100
    assert np.array_equal(Xs[: len(X)], X)
    assert np.array_equal(ys[: len(y)], y)


def test_smote_points_lie_between_minority_points():
    X, y = imbalanced()
    Xs, _ = smote(X, y, ResampleConfig("smote", k_neighbors=3))
    minority = X[y == 1]
    for p in Xs[len(X) :]:
        best = min(
            distance_to_segment(p, a, b)
            for i, a in enumerate(minority)
            for b in minority[i + 1 :]
        )
        assert best < 1e-9


def test_smote_is_seeded():
    X, y = imbalanced()
    a = smote(X, y, ResampleConfig("smote", seed=4))[0]
    b = smote(X, y, ResampleConfig("smote", seed=4))[0]
    c = smote(X, y, ResampleConfig("smote", seed=5))[0]
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_smote_clamps_k(caplog):
    X, y = imbalanced(n_minor=3)
    with caplog.at_level(logging.WARNING):
        _, ys = smote(X, y, ResampleConfig("smote", k_neighbors=5))
    assert "clamped to 2" in caplog.text
    assert (ys == 1).sum() == 100


def test_smote_needs_two_minority_rows():
    X, y = imbalanced(n_minor=1)
    with pytest.raises(ResampleError, match="at least two minority rows"):
        smote(X, y, ResampleConfig("smote"))


def test_smote_leaves_balanced_data_alone():
    X, y = imbalanced(n_major=20, n_minor=20)
    Xs, ys = smote(X, y, ResampleConfig("smote"))
    assert np.array_equal(Xs, X) and np.array_equal(ys, y)


# Rows 1-2 and 4-5 are Tomek links.
LINE_X = np.array([[0.0], [1.0], [1.4], [3.0], [6.0], [6.5]])
LINE_Y = np.array([0, 0, 1, 0, 0, 1])


def test_tomek_links():
    assert tomek_links(LINE_X, LINE_Y).tolist() == [[1, 2], [4, 5]]
    assert tomek_links(LINE_X[:1], LINE_Y[:1]).shape == (0, 2)


def test_tomek_single_pass():
    X, y = tomek_remove(LINE_X, LINE_Y)
    assert X.ravel().tolist() == [0.0, 1.4, 3.0, 6.5]
    assert y.tolist() == [0, 1, 0, 1]


def test_tomek_fixpoint():
    X, y = tomek_remove(LINE_X, LINE_Y, fixpoint=True)
    assert X.ravel().tolist() == [1.4, 6.5]
    assert y.tolist() == [1, 1]
    assert not len(tomek_links(X, y))


def test_tomek_equal_classes_clean_label_0():
    X = np.array([[0.0], [0.1], [5.0], [20.0]])
    _, y = tomek_remove(X, np.array([0, 1, 1, 0]))
    assert y.tolist() == [1, 1, 0]


def test_tomek_explicit_majority():
    _, y = tomek_remove(LINE_X, LINE_Y, majority=1)
    assert y.tolist() == [0, 0, 0, 0]


def test_apply_resampling_respects_the_target():
    X, y = imbalanced()
    cfg = ResampleConfig("smote_tomek", apply_to="nd2")
    Xr, yr = apply_resampling(X, y, cfg, "nd1")
    assert Xr is X and yr is y
    Xr, yr = apply_resampling(X, y, cfg, "nd2")
    assert (yr == 1).sum() == 100
    assert (yr == 0).sum() <= 100


@pytest.mark.parametrize(
    "kwargs",
    (
        {"strategy": "adasyn"},
        {"apply_to": "everything"},
        {"k_neighbors": 0},
        {"ratio": 0.0},
        {"ratio": 1.5},
        {"seed": -1},
    ),
)
def test_bad_configs(kwargs):
    with pytest.raises(ResampleError):
        ResampleConfig(**kwargs)
