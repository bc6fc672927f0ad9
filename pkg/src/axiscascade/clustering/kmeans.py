"""
k-means with k-means++ seeding and Lloyd iterations.

Iteration stops when the relative inertia change drops below ``tol`` or after
``max_iter`` rounds. An empty cluster keeps its previous center, which keeps
the inertia non-increasing.
"""

import numpy as np
from scipy.spatial.distance import cdist

from axiscascade.clustering.api import ClusterMethod, ClusterResult


def kmeans_plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    closest = cdist(X, centers[0][None, :], "sqeuclidean").ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers.append(X[idx])
        closest = np.minimum(
            closest, cdist(X, X[idx][None, :], "sqeuclidean").ravel()
        )
    return np.vstack(centers)


def lloyd(
    X: np.ndarray, centers: np.ndarray, max_iter: int, tol: float
) -> ClusterResult:
    """
    Runs Lloyd iterations from ``centers``. The history holds the inertia
    measured after each assignment step.
    """
    centers = centers.copy()
    history = []
    assignment = None
    converged = False
    for _ in range(max_iter):
        dist = cdist(X, centers, "sqeuclidean")
        new_assignment = np.argmin(dist, axis=1)
        inertia = float(dist[np.arange(X.shape[0]), new_assignment].sum())
        history.append(inertia)
        unchanged = assignment is not None and np.array_equal(
            assignment, new_assignment
        )
        assignment = new_assignment
        if len(history) > 1:
            prev = history[-2]
            if unchanged or abs(prev - inertia) <= tol * max(prev, 1e-300):
                converged = True
                break
        for j in range(centers.shape[0]):
            members = X[assignment == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    return ClusterResult(
        assignment=assignment,
        centers=centers,
        iterations=len(history),
        objective=history[-1],
        history=tuple(history),
        converged=converged,
    )


def fit_kmeans(
    X: np.ndarray, method: ClusterMethod, rng: np.random.Generator
) -> ClusterResult:
    init = kmeans_plus_plus(X, method.k, rng)
    return lloyd(X, init, method.max_iter, method.tol)
