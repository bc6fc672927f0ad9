"""A single CART classification tree; the score is the leaf's fraction of ones."""

from axiscascade.models.api import ModelKind, optional_positive_int, positive_int
from axiscascade.models.trees import grow_tree


def fit(X, y, rng, *, max_depth=None, min_samples_split=2, min_samples_leaf=1):
    tree = grow_tree(
        X,
        y,
        rng,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        min_samples_leaf=min_samples_leaf,
    )
    return {"tree": tree}, {"epochs": 1, "final_loss": None, "depth": tree.depth}


def score(params, X):
    return params["tree"].predict(X)


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={
        "max_depth": optional_positive_int,
        "min_samples_split": positive_int,
        "min_samples_leaf": positive_int,
    },
)
