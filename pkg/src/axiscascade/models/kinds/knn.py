"""
k-nearest neighbours under Euclidean distance. The score is the fraction of
the ``k`` nearest training points labelled 1; distance ties go to the lower
training index.
"""

import logging

import numpy as np
from scipy.spatial.distance import cdist

from axiscascade.models.api import ModelKind, positive_int

_logger = logging.getLogger(__name__)

_CHUNK = 512


def fit(X, y, rng, *, k=5):
    if k > len(X):
        _logger.warning("knn: k=%d exceeds %d training points; clamped", k, len(X))
        k = len(X)
    params = {"X": X.copy(), "y": y.astype(float), "k": k}
    return params, {"epochs": 0, "final_loss": None}


def score(params, X):
    train_X, train_y, k = params["X"], params["y"], params["k"]
    out = np.empty(len(X))
    for start in range(0, len(X), _CHUNK):
        dist = cdist(X[start : start + _CHUNK], train_X)
        nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
        out[start : start + _CHUNK] = train_y[nearest].mean(axis=1)
    return out


ENTRY_POINT = ModelKind(
    fit=fit, score=score, checks={"k": positive_int}, requires_both_classes=False
)
