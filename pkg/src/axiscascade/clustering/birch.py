"""
Birch: a CF-tree pass that summarizes the points into leaf subclusters,
followed by agglomerative merging of the subcluster centroids down to ``k``
clusters. Every point takes the label of its nearest subcluster.

A clustering feature (CF) is ``(n, linear_sum, squared_sum)``. A point joins
its closest leaf subcluster when the merged radius stays within
``threshold``; nodes holding more than ``branching`` entries split around
their two most distant entries.
"""

from typing import List, Optional

import numpy as np
from scipy.spatial.distance import cdist

from axiscascade.clustering.agglomerative import agglomerate
from axiscascade.clustering.api import (
    ClusterMethod,
    ClusterResult,
    cluster_means,
    within_ss,
)
from axiscascade.core.errors import DegenerateClusteringError


class _CF:
    __slots__ = ("n", "ls", "ss", "child")

    def __init__(self, n: int, ls: np.ndarray, ss: float, child=None):
        self.n = n
        self.ls = ls
        self.ss = ss
        self.child: Optional[_Node] = child

    @classmethod
    def of_point(cls, x: np.ndarray) -> "_CF":
        return cls(1, x.copy(), float(x @ x))

    @property
    def centroid(self) -> np.ndarray:
        return self.ls / self.n

    def add_point(self, x: np.ndarray) -> None:
        self.n += 1
        self.ls = self.ls + x
        self.ss += float(x @ x)

    def radius_with(self, x: np.ndarray) -> float:
        n = self.n + 1
        ls = self.ls + x
        ss = self.ss + float(x @ x)
        c = ls / n
        return float(np.sqrt(max(0.0, ss / n - float(c @ c))))


class _Node:
    __slots__ = ("is_leaf", "entries")

    def __init__(self, is_leaf: bool, entries: Optional[List[_CF]] = None):
        self.is_leaf = is_leaf
        self.entries: List[_CF] = entries if entries is not None else []

    def summary(self, child: "_Node") -> _CF:
        n = sum(e.n for e in self.entries)
        ls = np.sum([e.ls for e in self.entries], axis=0)
        ss = sum(e.ss for e in self.entries)
        return _CF(n, ls, ss, child)

    def closest(self, x: np.ndarray) -> int:
        centroids = np.vstack([e.centroid for e in self.entries])
        return int(np.argmin(((centroids - x) ** 2).sum(axis=1)))


def _split(node: _Node):
    centroids = np.vstack([e.centroid for e in node.entries])
    dist = cdist(centroids, centroids)
    a, b = np.unravel_index(int(np.argmax(dist)), dist.shape)
    left, right = _Node(node.is_leaf), _Node(node.is_leaf)
    for idx, entry in enumerate(node.entries):
        (left if dist[idx, a] <= dist[idx, b] else right).entries.append(entry)
    if not right.entries:
        right.entries.append(left.entries.pop())
    return left, right


class CFTree:
    def __init__(self, threshold: float, branching: int):
        self.threshold = threshold
        self.branching = branching
        self.root = _Node(is_leaf=True)

    def insert(self, x: np.ndarray) -> None:
        path = []
        node = self.root
        while not node.is_leaf:
            idx = node.closest(x)
            path.append((node, idx))
            node = node.entries[idx].child
        if node.entries:
            idx = node.closest(x)
            entry = node.entries[idx]
            if entry.radius_with(x) <= self.threshold:
                entry.add_point(x)
            else:
                node.entries.append(_CF.of_point(x))
        else:
            node.entries.append(_CF.of_point(x))
        for parent, idx in path:
            parent.entries[idx].add_point(x)
        # Split overflowing nodes bottom-up.
        child = node
        for parent, idx in reversed(path):
            if len(child.entries) <= self.branching:
                return
            left, right = _split(child)
            parent.entries[idx : idx + 1] = [left.summary(left), right.summary(right)]
            child = parent
        if len(child.entries) > self.branching:
            left, right = _split(child)
            self.root = _Node(
                is_leaf=False, entries=[left.summary(left), right.summary(right)]
            )

    def leaf_entries(self) -> List[_CF]:
        out: List[_CF] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.extend(node.entries)
            else:
                stack.extend(reversed([e.child for e in node.entries]))
        return out


def fit_birch(
    X: np.ndarray, method: ClusterMethod, rng: np.random.Generator
) -> ClusterResult:
    tree = CFTree(method.threshold, method.branching)
    for x in X:
        tree.insert(x)
    leaves = tree.leaf_entries()
    if len(leaves) < method.k:
        raise DegenerateClusteringError(
            f"Birch found only {len(leaves)} subclusters for k={method.k}; "
            f"lower the threshold (now {method.threshold})"
        )
    centroids = np.vstack([e.centroid for e in leaves])
    sizes = np.array([e.n for e in leaves], dtype=float)
    sub_labels = agglomerate(centroids, method.k, method.linkage, sizes=sizes)
    nearest = np.argmin(cdist(X, centroids, "sqeuclidean"), axis=1)
    assignment = sub_labels[nearest]
    return ClusterResult(
        assignment=assignment,
        centers=cluster_means(X, assignment),
        iterations=len(leaves),
        objective=within_ss(X, assignment),
    )
