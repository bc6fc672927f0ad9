"""
DBSCAN with the Euclidean metric.

A point is a core point when at least ``min_pts`` points (itself included)
lie within distance ``eps``. Clusters grow breadth-first from core points in
index order; border points join the first cluster that reaches them, and
everything else is noise (``-1``).
"""

from collections import deque
from typing import List

import numpy as np
from scipy.spatial.distance import cdist

from axiscascade.clustering.api import (
    ClusterMethod,
    ClusterResult,
    cluster_means,
    within_ss,
)

_CHUNK_ROWS = 512


def radius_neighbors(X: np.ndarray, eps: float) -> List[np.ndarray]:
    neighbors = []
    for start in range(0, X.shape[0], _CHUNK_ROWS):
        dist = cdist(X[start : start + _CHUNK_ROWS], X)
        neighbors.extend(np.flatnonzero(row <= eps) for row in dist)
    return neighbors


def fit_dbscan(
    X: np.ndarray, method: ClusterMethod, rng: np.random.Generator
) -> ClusterResult:
    n = X.shape[0]
    neighbors = radius_neighbors(X, method.eps)
    is_core = np.array([len(nb) >= method.min_pts for nb in neighbors])
    assignment = np.full(n, -1, dtype=int)
    next_label = 0
    for seed in range(n):
        if not is_core[seed] or assignment[seed] >= 0:
            continue
        assignment[seed] = next_label
        queue = deque([seed])
        while queue:
            point = queue.popleft()
            if not is_core[point]:
                continue
            for nb in neighbors[point]:
                if assignment[nb] < 0:
                    assignment[nb] = next_label
                    queue.append(nb)
        next_label += 1
    return ClusterResult(
        assignment=assignment,
        centers=cluster_means(X, assignment),
        iterations=1,
        objective=within_ss(X, assignment),
    )
