"""
CART trees shared by the ``dtree``, ``rf`` and ``gboost`` kinds.

Trees are grown depth-first over index arrays. Split search on one feature
sorts the node's values once and scores every cut between distinct values
with cumulative sums, so a node costs ``O(n log n)`` per candidate feature.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

__all__ = ["Tree", "grow_tree"]

_LEAF = -1


@dataclass(frozen=True)
class Tree:
    """
    A fitted binary tree stored as parallel node arrays.

    ``feature[i] == -1`` marks node ``i`` as a leaf; otherwise rows with
    ``x[feature[i]] <= threshold[i]`` go to ``left[i]``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] != _LEAF:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Returns the leaf index each row of ``X`` lands in."""
        node = np.zeros(len(X), dtype=int)
        active = self.feature[node] != _LEAF
        while active.any():
            rows = np.flatnonzero(active)
            at = node[rows]
            go_left = X[rows, self.feature[at]] <= self.threshold[at]
            node[rows] = np.where(go_left, self.left[at], self.right[at])
            active[rows] = self.feature[node[rows]] != _LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


def _impurity_sums(ys: np.ndarray, criterion: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Total impurity of every left/right split of sorted targets ``ys``.

    Entry ``j`` describes the split with ``j + 1`` rows on the left. Gini is
    weighted by node size, ``n * 2p(1-p)``; MSE is the sum of squared errors.
    """
    n = len(ys)
    n_left = np.arange(1, n, dtype=float)
    n_right = n - n_left
    s_left = np.cumsum(ys)[:-1]
    s_right = ys.sum() - s_left
    if criterion == "gini":
        left = 2.0 * s_left * (n_left - s_left) / n_left
        right = 2.0 * s_right * (n_right - s_right) / n_right
    else:
        q_left = np.cumsum(ys * ys)[:-1]
        q_right = (ys * ys).sum() - q_left
        left = q_left - s_left**2 / n_left
        right = q_right - s_right**2 / n_right
    return left, right


def _node_impurity(y: np.ndarray, criterion: str) -> float:
    n = len(y)
    s = y.sum()
    if criterion == "gini":
        return float(2.0 * s * (n - s) / n)
    return float((y * y).sum() - s * s / n)


def _best_split_on(
    x: np.ndarray, y: np.ndarray, criterion: str, min_samples_leaf: int
) -> Optional[Tuple[float, float]]:
    """Returns ``(impurity, threshold)`` of the best cut on one feature."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    left, right = _impurity_sums(ys, criterion)
    n = len(xs)
    pos = np.arange(1, n)
    valid = (xs[1:] > xs[:-1]) & (pos >= min_samples_leaf)
    valid &= n - pos >= min_samples_leaf
    if not valid.any():
        return None
    total = np.where(valid, left + right, np.inf)
    j = int(np.argmin(total))
    lo, hi = xs[j], xs[j + 1]
    threshold = lo + (hi - lo) / 2.0
    if not lo <= threshold < hi:
        threshold = lo
    return float(total[j]), float(threshold)


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    *,
    criterion: str = "gini",
    max_depth: Optional[int] = None,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
    max_features: Optional[int] = None,
    leaf_value=None,
) -> Tree:
    """
    Grows a CART tree.

    :param criterion: ``"gini"`` for 0/1 targets (leaf value is the fraction of
        ones) or ``"mse"`` for real targets (leaf value is the mean).
    :param max_features: number of features drawn at random for each split;
        `None` uses all of them. When none of the drawn features can split the
        node, the remaining features are tried in random order.
    :param leaf_value: optional ``f(indices) -> float`` replacing the default
        leaf value; gradient boosting uses it for Newton leaf steps.

    >>> X = np.array([[0.0], [1.0], [2.0], [3.0]])
    >>> tree = grow_tree(X, np.array([0.0, 0.0, 1.0, 1.0]), np.random.default_rng(0))
    >>> tree.predict(X).tolist()
    [0.0, 0.0, 1.0, 1.0]
    >>> float(tree.threshold[0])
    1.5
    """
    n, d = X.shape
    y = np.asarray(y, dtype=float)
    max_features = d if max_features is None else min(max_features, d)

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[float] = []

    def new_node(idx: np.ndarray) -> int:
        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(_LEAF)
        right.append(_LEAF)
        value.append(float(leaf_value(idx)) if leaf_value else float(y[idx].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(n)), np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yi = y[idx]
        if (
            len(idx) < min_samples_split
            or (max_depth is not None and depth >= max_depth)
            or _node_impurity(yi, criterion) <= 0.0
        ):
            continue
        order = rng.permutation(d)
        best = None
        for rank, f in enumerate(order):
            if rank >= max_features and best is not None:
                break
            found = _best_split_on(X[idx, f], yi, criterion, min_samples_leaf)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], found[1], int(f))
        if best is None:
            continue
        _, cut, f = best
        goes_left = X[idx, f] <= cut
        left_idx, right_idx = idx[goes_left], idx[~goes_left]
        feature[node], threshold[node] = f, cut
        left[node] = new_node(left_idx)
        right[node] = new_node(right_idx)
        stack.append((right[node], right_idx, depth + 1))
        stack.append((left[node], left_idx, depth + 1))

    return Tree(
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        value=np.asarray(value, dtype=float),
    )
