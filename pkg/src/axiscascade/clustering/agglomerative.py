"""
Naive agglomerative clustering over a full distance matrix, with
Lance-Williams updates for single, complete and average linkage.

Each merge scans the whole matrix, so the cost is cubic in the number of
points; Birch uses this on its (much smaller) set of leaf subclusters.
"""

from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from axiscascade.clustering.api import (
    ClusterMethod,
    ClusterResult,
    cluster_means,
    within_ss,
)


def agglomerate(
    X: np.ndarray, k: int, linkage: str, sizes: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Merges the closest pair of clusters until ``k`` remain. The pair with the
    lowest (row, column) index wins distance ties. Labels are numbered by
    first appearance in point order.

    >>> agglomerate(np.array([[0.0], [0.1], [5.0], [5.2]]), 2, "single").tolist()
    [0, 0, 1, 1]

    :param sizes: optional point weights (e.g. subcluster sizes) used by
        average linkage.
    """
    n = X.shape[0]
    dist = cdist(X, X)
    np.fill_diagonal(dist, np.inf)
    weight = np.ones(n) if sizes is None else np.asarray(sizes, dtype=float).copy()
    owner = np.arange(n)
    active = np.ones(n, dtype=bool)
    for _ in range(n - k):
        flat = int(np.argmin(dist))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        if linkage == "single":
            merged = np.minimum(dist[i], dist[j])
        elif linkage == "complete":
            merged = np.maximum(dist[i], dist[j])
        else:
            merged = (weight[i] * dist[i] + weight[j] * dist[j]) / (
                weight[i] + weight[j]
            )
        weight[i] += weight[j]
        active[j] = False
        merged[~active] = np.inf
        merged[i] = np.inf
        dist[i, :] = merged
        dist[:, i] = merged
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        owner[owner == j] = i
    _, first = np.unique(owner, return_index=True)
    relabel = {int(owner[idx]): rank for rank, idx in enumerate(sorted(first))}
    return np.array([relabel[int(o)] for o in owner], dtype=int)


def fit_agglomerative(
    X: np.ndarray, method: ClusterMethod, rng: np.random.Generator
) -> ClusterResult:
    assignment = agglomerate(X, method.k, method.linkage)
    return ClusterResult(
        assignment=assignment,
        centers=cluster_means(X, assignment),
        iterations=X.shape[0] - method.k,
        objective=within_ss(X, assignment),
    )
