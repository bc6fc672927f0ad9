"""
Class-imbalance resampling of training matrices: SMOTE oversampling of the
minority class and Tomek-link cleaning of the majority class.

Distances are Euclidean in whatever space the rows already live in; the
pipeline hands over encoder output, i.e. standardized features. Test data is
never resampled.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from axiscascade.core.errors import ResampleError

__all__ = [
    "APPLY_TO",
    "STRATEGIES",
    "ResampleConfig",
    "apply_resampling",
    "smote",
    "smote_target",
    "tomek_links",
    "tomek_remove",
]

_logger = logging.getLogger(__name__)

STRATEGIES = ("none", "smote", "tomek", "smote_tomek")
APPLY_TO = ("none", "nd1", "nd2", "both", "single")


@dataclass(frozen=True)
class ResampleConfig:
    """
    :param ratio: the target minority:majority ratio after SMOTE.
    :param apply_to: which training sets are resampled: the stage-one set, the
        stage-two set, both, or the single-stage baseline's set.
    :param fixpoint: repeat Tomek cleaning until no link remains.
    """

    strategy: str = "none"
    k_neighbors: int = 5
    ratio: float = 1.0
    apply_to: str = "none"
    seed: int = 0
    fixpoint: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ResampleError(
                f"Unknown resampling strategy:\n"
                f"    strategy: {self.strategy!r}\n"
                f"    known:    {STRATEGIES}"
            )
        if self.apply_to not in APPLY_TO:
            raise ResampleError(
                f"Unknown resampling target:\n"
                f"    apply_to: {self.apply_to!r}\n"
                f"    known:    {APPLY_TO}"
            )
        if not isinstance(self.k_neighbors, int) or self.k_neighbors < 1:
            raise ResampleError(f"k_neighbors must be >= 1, got {self.k_neighbors!r}")
        if not 0 < self.ratio <= 1:
            raise ResampleError(f"ratio must be in (0, 1], got {self.ratio!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ResampleError(f"seed must be an integer >= 0, got {self.seed!r}")

    def applies_to(self, target: str) -> bool:
        """
        >>> ResampleConfig("smote", apply_to="both").applies_to("nd2")
        True
        >>> ResampleConfig("smote", apply_to="nd1").applies_to("single")
        False
        """
        if self.strategy == "none":
            return False
        return self.apply_to == target or (
            self.apply_to == "both" and target in ("nd1", "nd2")
        )

    def as_dict(self):
        return {
            "strategy": self.strategy,
            "k_neighbors": self.k_neighbors,
            "ratio": self.ratio,
            "apply_to": self.apply_to,
            "seed": self.seed,
            "fixpoint": self.fixpoint,
        }


def _classes(y: np.ndarray) -> Tuple[int, int]:
    """Returns ``(majority, minority)``; equal sizes make 0 the majority."""
    n1 = int((y == 1).sum())
    n0 = len(y) - n1
    return (1, 0) if n1 > n0 else (0, 1)


def smote_target(n_majority: int, ratio: float) -> int:
    """
    The minority count SMOTE grows to, ``floor(ratio * n_majority + 0.5)``.

    >>> smote_target(100, 1.0), smote_target(100, 0.25), smote_target(5, 0.5)
    (100, 25, 3)
    """
    return int(np.floor(ratio * n_majority + 0.5))


def smote(
    X: np.ndarray, y: np.ndarray, cfg: ResampleConfig, seed: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Appends synthetic minority rows ``x + u * (x_nn - x)``, with ``u`` uniform
    on ``[0, 1]`` and ``x_nn`` one of the ``k_neighbors`` nearest minority
    neighbours of ``x``, until the minority reaches `.smote_target`. Input rows
    come first in the output, unchanged.

    :raises ResampleError: the minority class has fewer than two rows.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    majority, minority = _classes(y)
    minority_rows = np.flatnonzero(y == minority)
    n_min = len(minority_rows)
    n_maj = len(y) - n_min
    if n_min < 2:
        raise ResampleError(
            f"SMOTE needs at least two minority rows:\n"
            f"    minority label: {minority}\n"
            f"    rows:           {n_min}"
        )
    n_new = max(0, smote_target(n_maj, cfg.ratio) - n_min)
    if n_new == 0:
        return X.copy(), y.copy()
    k = cfg.k_neighbors
    if k >= n_min:
        _logger.warning("SMOTE: k_neighbors=%d clamped to %d", k, n_min - 1)
        k = n_min - 1
    Xm = X[minority_rows]
    dist = cdist(Xm, Xm)
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    base = rng.integers(0, n_min, size=n_new)
    pick = neighbors[base, rng.integers(0, k, size=n_new)]
    u = rng.random(n_new)[:, None]
    synthetic = Xm[base] + u * (Xm[pick] - Xm[base])
    _logger.info(
        "SMOTE: %d synthetic rows of label %d (%d -> %d)",
        n_new,
        minority,
        n_min,
        n_min + n_new,
    )
    return (
        np.vstack([X, synthetic]),
        np.concatenate([y, np.full(n_new, minority)]),
    )


def tomek_links(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Index pairs ``(i, j)``, ``i < j``, that are each other's nearest neighbour
    and carry different labels. Distance ties go to the lower index.

    >>> X = np.array([[0.0], [5.0], [0.1]])
    >>> tomek_links(X, np.array([0, 0, 1])).tolist()
    [[0, 2]]
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if len(X) < 2:
        return np.empty((0, 2), dtype=int)
    dist = cdist(X, X)
    np.fill_diagonal(dist, np.inf)
    nearest = np.argmin(dist, axis=1)
    i = np.arange(len(X))
    linked = (nearest[nearest] == i) & (y != y[nearest]) & (i < nearest)
    return np.column_stack([i[linked], nearest[linked]])


def tomek_remove(
    X: np.ndarray,
    y: np.ndarray,
    majority: Optional[int] = None,
    fixpoint: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Drops the majority member of every Tomek link; minority rows are never
    removed.

    :param majority: the label to clean; defaults to the larger class.
    :param fixpoint: repeat until no link is left, at most as many passes as
        there are majority rows.

    >>> X = np.array([[0.0], [5.0], [0.1]])
    >>> Xc, yc = tomek_remove(X, np.array([0, 0, 1]))
    >>> Xc.ravel().tolist(), yc.tolist()
    ([5.0, 0.1], [0, 1])
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if majority is None:
        majority = _classes(y)[0]
    passes = max(1, int((y == majority).sum())) if fixpoint else 1
    for _ in range(passes):
        links = tomek_links(X, y)
        if not len(links):
            break
        members = links.ravel()
        drop = np.unique(members[y[members] == majority])
        keep = np.setdiff1d(np.arange(len(y)), drop)
        _logger.info("Tomek: removed %d rows of label %d", len(drop), majority)
        X, y = X[keep], y[keep]
    return X, y


def apply_resampling(
    X: np.ndarray, y: np.ndarray, cfg: ResampleConfig, target: str
) -> Tuple[np.ndarray, np.ndarray]:
    """Resamples a training matrix if ``cfg`` applies to ``target``."""
    if not cfg.applies_to(target):
        return X, y
    majority = _classes(np.asarray(y))[0]
    if cfg.strategy in ("smote", "smote_tomek"):
        X, y = smote(X, y, cfg)
    if cfg.strategy in ("tomek", "smote_tomek"):
        X, y = tomek_remove(X, y, majority=majority, fixpoint=cfg.fixpoint)
    return X, y
