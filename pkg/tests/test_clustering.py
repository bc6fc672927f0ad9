"""
The five clustering methods behind `axiscascade.clustering.cluster`.
"""

import numpy as np
import pytest

from axiscascade.clustering import CLUSTER_METHODS, ClusterMethod, cluster
from axiscascade.clustering.agglomerative import agglomerate
from axiscascade.core.errors import (
    ClusteringError,
    DegenerateClusteringError,
    ValidationError,
)


def blobs(seed=0, n=60):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]])
    X = np.vstack([c + rng.normal(scale=0.4, size=(n, 2)) for c in centers])
    truth = np.repeat(np.arange(3), n)
    return X, truth


def same_partition(a, b):
    """Whether two labelings group the points identically."""
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


@pytest.mark.parametrize(
    "method",
    (
        ClusterMethod("kmeans", k=3),
        ClusterMethod("gmm_diag", k=3),
        ClusterMethod("dbscan", eps=1.0, min_pts=4),
        ClusterMethod("agglomerative", k=3, linkage="single"),
        ClusterMethod("agglomerative", k=3, linkage="average"),
        ClusterMethod("agglomerative", k=3, linkage="complete"),
        ClusterMethod("birch", k=3, threshold=1.0),
    ),
    ids=lambda m: m.tag,
)
def test_recovers_well_separated_blobs(method):
    X, truth = blobs()
    result = cluster(X, method, seed=3)
    assert result.assignment.shape == (len(X),)
    assert result.n_clusters == 3
    kept = result.assignment >= 0
    assert same_partition(result.assignment[kept], truth[kept])


@pytest.mark.parametrize("seed", range(5))
def test_kmeans_inertia_never_increases(seed):
    X, _ = blobs(seed)
    result = cluster(X, ClusterMethod("kmeans", k=4, tol=1e-12), seed=seed)
    history = np.array(result.history)
    assert len(history) >= 2
    assert np.all(np.diff(history) <= 1e-9 * np.abs(history[:-1]))
    assert result.objective == history[-1]


@pytest.mark.parametrize("seed", range(5))
def test_gmm_loglik_never_decreases(seed):
    X, _ = blobs(seed)
    result = cluster(X, ClusterMethod("gmm_diag", k=3, tol=1e-12), seed=seed)
    history = np.array(result.history)
    assert np.all(np.diff(history) >= -1e-9 * np.abs(history[:-1]))


def test_gmm_tolerance_is_per_point():
    X, _ = blobs(3)
    tol = 1e-3
    result = cluster(X, ClusterMethod("gmm_diag", k=3, tol=tol), seed=3)
    assert result.converged
    steps = np.abs(np.diff(result.history)) / len(X)
    assert steps[-1] < tol
    assert np.all(steps[:-1] >= tol)


def test_same_seed_same_clusters():
    X, _ = blobs(1)
    for name in ("kmeans", "gmm_diag"):
        a = cluster(X, ClusterMethod(name, k=3), seed=7)
        b = cluster(X, ClusterMethod(name, k=3), seed=7)
        assert np.array_equal(a.assignment, b.assignment)
        assert a.history == b.history


def test_dbscan_marks_noise():
    X = np.array([[0.0], [0.1], [0.2], [10.0]])
    result = cluster(X, ClusterMethod("dbscan", eps=0.15, min_pts=2))
    assert result.assignment.tolist() == [0, 0, 0, -1]
    assert result.diagnostics()["noise"] == 1


def test_agglomerate_linkages_differ():
    X = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.5]])
    assert agglomerate(X, 2, "single").tolist() == [0, 0, 0, 0, 0, 1]
    assert agglomerate(X, 2, "complete").tolist() == [0, 0, 0, 0, 1, 1]


@pytest.mark.parametrize("linkage", ("single", "average", "complete"))
def test_one_cluster_per_point(linkage):
    X, _ = blobs(seed=2, n=5)
    assert agglomerate(X, len(X), linkage).tolist() == list(range(len(X)))
    method = ClusterMethod("agglomerative", k=len(X), linkage=linkage)
    result = cluster(X, method)
    assert len(set(result.assignment.tolist())) == len(X)
    assert result.objective == 0.0


def test_birch_threshold_too_large():
    X, _ = blobs()
    with pytest.raises(DegenerateClusteringError):
        cluster(X, ClusterMethod("birch", k=3, threshold=100.0))


def test_errors():
    with pytest.raises(ClusteringError):
        cluster([[0.0, 0.0], [1.0, 1.0]], ClusterMethod("kmeans", k=3))
    with pytest.raises(DegenerateClusteringError):
        cluster(np.ones((5, 2)), ClusterMethod("gmm_diag", k=2))
    with pytest.raises(ClusteringError):
        cluster([[0.0, np.inf]], ClusterMethod("kmeans", k=1))
    with pytest.raises(ValidationError):
        ClusterMethod("spectral")
    with pytest.raises(ValidationError):
        ClusterMethod("agglomerative", linkage="ward")
    assert "birch" in CLUSTER_METHODS
