"""
Random forest: bootstrapped CART trees with a random feature subset per split.
The score is the mean of the trees' leaf fractions.

``feature_fraction=None`` draws ``floor(sqrt(d))`` features per split.
"""

import math

import numpy as np

from axiscascade.models.api import (
    ModelKind,
    boolean,
    optional_fraction,
    optional_positive_int,
    positive_int,
)
from axiscascade.models.trees import grow_tree


def features_per_split(d: int, feature_fraction) -> int:
    """
    >>> [features_per_split(d, f) for d, f in [(8, None), (8, 0.5), (3, 0.01)]]
    [2, 4, 1]
    """
    if feature_fraction is None:
        return max(1, math.isqrt(d))
    return max(1, int(round(feature_fraction * d)))


def fit(
    X,
    y,
    rng,
    *,
    n_trees=50,
    max_depth=None,
    feature_fraction=None,
    bootstrap=True,
    min_samples_leaf=1,
):
    n, d = X.shape
    max_features = features_per_split(d, feature_fraction)
    trees = []
    for _ in range(n_trees):
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(
            grow_tree(
                X[rows],
                y[rows],
                rng,
                max_depth=max_depth,
                min_samples_leaf=min_samples_leaf,
                max_features=max_features,
            )
        )
    return {"trees": trees}, {"epochs": n_trees, "final_loss": None}


def score(params, X):
    return np.mean([tree.predict(X) for tree in params["trees"]], axis=0)


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={
        "n_trees": positive_int,
        "max_depth": optional_positive_int,
        "feature_fraction": optional_fraction,
        "bootstrap": boolean,
        "min_samples_leaf": positive_int,
    },
)
