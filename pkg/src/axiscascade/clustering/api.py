"""
The clustering contract: `.ClusterMethod` configures a run, `.cluster` runs
it, and `.ClusterResult` carries the assignment and diagnostics.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from axiscascade.core.errors import (
    ClusteringError,
    DegenerateClusteringError,
    ValidationError,
)

__all__ = ["CLUSTER_METHODS", "ClusterMethod", "ClusterResult", "cluster"]

_logger = logging.getLogger(__name__)

CLUSTER_METHODS = ("kmeans", "gmm_diag", "dbscan", "agglomerative", "birch")
LINKAGES = ("single", "average", "complete")
_USES_K = ("kmeans", "gmm_diag", "agglomerative", "birch")


@dataclass(frozen=True)
class ClusterMethod:
    """
    A clustering algorithm and its parameters. Parameters that do not apply
    to ``name`` are ignored.

    ``tol`` is relative for k-means (inertia change over the previous
    inertia) and per point for the GMM (total log-likelihood change divided
    by the number of points), so neither depends on the dataset size.

    >>> ClusterMethod("kmeans", k=0)
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.ValidationError: cluster count k must be >= 1, got 0
    """

    name: str
    k: int = 2
    eps: float = 0.5
    min_pts: int = 5
    linkage: str = "average"
    threshold: float = 1.0
    branching: int = 50
    max_iter: int = 300
    tol: float = 1e-6
    var_floor: float = 1e-6

    def __post_init__(self):
        if self.name not in CLUSTER_METHODS:
            raise ValidationError(
                f"Unknown clustering method:\n"
                f"    name:  {self.name!r}\n"
                f"    known: {list(CLUSTER_METHODS)}"
            )
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"cluster count k must be >= 1, got {self.k}")
        if not self.eps > 0:
            raise ValidationError(f"dbscan eps must be > 0, got {self.eps}")
        if int(self.min_pts) != self.min_pts or self.min_pts < 1:
            raise ValidationError(f"dbscan min_pts must be >= 1, got {self.min_pts}")
        if self.linkage not in LINKAGES:
            raise ValidationError(
                f"linkage must be one of {list(LINKAGES)}, got {self.linkage!r}"
            )
        if not self.threshold > 0:
            raise ValidationError(f"birch threshold must be > 0, got {self.threshold}")
        if int(self.branching) != self.branching or self.branching < 2:
            raise ValidationError(
                f"birch branching factor must be >= 2, got {self.branching}"
            )
        if self.max_iter < 1 or not self.tol > 0 or not self.var_floor > 0:
            raise ValidationError(
                f"need max_iter >= 1, tol > 0 and var_floor > 0, got "
                f"{self.max_iter}, {self.tol}, {self.var_floor}"
            )

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ClusterMethod":
        raw = dict(raw)
        if "name" not in raw and "method" in raw:
            raw["name"] = raw.pop("method")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ValidationError(f"bad clustering parameters {raw}: {exc}") from None

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def tag(self) -> str:
        """Short provenance string, e.g. ``cluster:kmeans(k=2)``."""
        if self.name == "dbscan":
            params = f"eps={self.eps},min_pts={self.min_pts}"
        elif self.name == "agglomerative":
            params = f"k={self.k},linkage={self.linkage}"
        elif self.name == "birch":
            params = f"k={self.k},T={self.threshold},B={self.branching}"
        else:
            params = f"k={self.k}"
        return f"cluster:{self.name}({params})"


@dataclass(frozen=True, eq=False)
class ClusterResult:
    """
    ``assignment[i]`` is the cluster of point ``i`` (``-1`` for DBSCAN
    noise). ``history`` holds the per-iteration objective (inertia for
    k-means, total log-likelihood for GMM); ``objective`` is its final value
    or, for the other methods, the within-cluster sum of squares.
    """

    assignment: np.ndarray
    centers: Optional[np.ndarray]
    iterations: int
    objective: float
    history: Tuple[float, ...] = field(default=())
    converged: bool = True

    @property
    def n_clusters(self) -> int:
        return len(set(int(a) for a in self.assignment if a >= 0))

    def diagnostics(self) -> Dict[str, Any]:
        return {
            "n_clusters": self.n_clusters,
            "iterations": int(self.iterations),
            "objective": float(self.objective),
            "converged": bool(self.converged),
            "noise": int(np.sum(self.assignment < 0)),
        }


def cluster_means(X: np.ndarray, assignment: np.ndarray) -> np.ndarray:
    labels = sorted(set(int(a) for a in assignment if a >= 0))
    if not labels:
        return np.zeros((0, X.shape[1]))
    return np.vstack([X[assignment == label].mean(axis=0) for label in labels])


def within_ss(X: np.ndarray, assignment: np.ndarray) -> float:
    total = 0.0
    for label in set(int(a) for a in assignment if a >= 0):
        members = X[assignment == label]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def cluster(points, method: ClusterMethod, seed: int = 0) -> ClusterResult:
    """
    Clusters ``points`` (an ``(n, d)`` array or a list of vectors).

    >>> res = cluster([[0.0, 0.0]], ClusterMethod("kmeans", k=1))
    >>> res.assignment.tolist(), res.centers.tolist()
    ([0], [[0.0, 0.0]])

    :raises ClusteringError: ``k`` exceeds the number of points, or the input
        is empty or ragged.
    :raises DegenerateClusteringError: all points coincide and ``k > 1``.
    """
    from axiscascade.clustering import agglomerative, birch, dbscan, gmm, kmeans

    try:
        X = np.asarray(points, dtype=float)
    except ValueError as exc:
        raise ClusteringError(f"points must share one dimension: {exc}") from None
    if X.ndim != 2 or X.shape[0] < 1:
        raise ClusteringError(f"need at least one point, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ClusteringError("points contain non-finite values")
    n = X.shape[0]
    if method.name in _USES_K:
        if method.k > n:
            raise ClusteringError(f"k={method.k} exceeds the number of points {n}")
        if method.k > 1 and np.all(np.ptp(X, axis=0) == 0):
            raise DegenerateClusteringError(
                f"all {n} points are identical; cannot form k={method.k} clusters"
            )
    runners = {
        "kmeans": kmeans.fit_kmeans,
        "gmm_diag": gmm.fit_gmm_diag,
        "dbscan": dbscan.fit_dbscan,
        "agglomerative": agglomerative.fit_agglomerative,
        "birch": birch.fit_birch,
    }
    rng = np.random.default_rng(seed)
    result = runners[method.name](X, method, rng)
    _logger.info("%s: %s", method.tag, result.diagnostics())
    return result
