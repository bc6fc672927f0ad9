"""
Relabeling of the training split into the three groups the cascade trains
on, and construction of the two derived training sets.

Gold label ``1`` marks negative (attack) messages. Every gold-negative
training record goes to ``n``. Gold positives are split between ``p0``
(clean) and ``p2`` ("label 2": positives that look negative), either by the
axis rule or by the clustering rule:

- Axis rule: with ``emb1`` and ``emb0`` the centroids of the negative and
  positive training embeddings, a positive goes to ``p2`` iff
  ``cos(x, emb1) - cos(x, emb0) > t``. Equality goes to ``p0``.
- Clustering rule: cluster all training embeddings; the cluster holding the
  most gold negatives (lowest cluster label on ties) is the negative cluster,
  and the positives inside it go to ``p2``.

The first-stage set (ND1) labels ``p0`` as 0 and ``p2`` and ``n`` as 1. The
second-stage set (ND2) keeps only ``p2`` (as 0) and ``n`` (as 1).

Only embeddings take part; test records are never relabeled.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Union

import numpy as np
import pandas as pd

from axiscascade.clustering import ClusterMethod, cluster
from axiscascade.core.errors import (
    DegenerateClusteringError,
    DegenerateStageError,
    DimensionMismatchError,
    ValidationError,
)
from axiscascade.data.dataset import Dataset
from axiscascade.embed.words import cosine_rows

__all__ = [
    "AxisEmbeddings",
    "ThresholdConfig",
    "TrainPartition",
    "assign_axis",
    "assign_cluster",
    "axis_embeddings",
    "axis_margins",
    "build_nd1",
    "build_nd2",
    "export_partition",
    "partition_from_assignment",
]

_logger = logging.getLogger(__name__)

PARTITION_NAMES = ("p0", "p2", "n")


@dataclass(frozen=True, eq=False)
class AxisEmbeddings:
    emb0: np.ndarray
    emb1: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.emb0.shape[0])


@dataclass(frozen=True)
class ThresholdConfig:
    """
    >>> ThresholdConfig(float("nan"))
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.ValidationError: threshold t must be finite, got nan
    """

    t: float = 0.0

    def __post_init__(self):
        if not isinstance(self.t, (int, float)) or not math.isfinite(self.t):
            raise ValidationError(f"threshold t must be finite, got {self.t}")

    @property
    def tag(self) -> str:
        return f"axis(t={self.t:g})"


@dataclass(frozen=True)
class TrainPartition:
    """
    Disjoint id sets covering the training split: clean positives ``p0``,
    label-2 positives ``p2`` and gold negatives ``n``.
    """

    p0: FrozenSet[str]
    p2: FrozenSet[str]
    n: FrozenSet[str]
    method_tag: str

    def __post_init__(self):
        for name in PARTITION_NAMES:
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if (self.p0 & self.p2) or (self.p0 & self.n) or (self.p2 & self.n):
            raise ValidationError("partition sets p0, p2 and n must be disjoint")
        if not self.method_tag:
            raise ValidationError("partition needs a method tag")

    @property
    def size(self) -> int:
        return len(self.p0) + len(self.p2) + len(self.n)

    def group_of(self, doc_id: str) -> str:
        for name in PARTITION_NAMES:
            if doc_id in getattr(self, name):
                return name
        raise KeyError(doc_id)

    def counts(self) -> Dict[str, Union[int, str]]:
        """
        One row of the partition count table: the ND1 label-0 count, the
        negative count, the label-2 count, and the total.
        """
        return {
            "method": self.method_tag,
            "label_0": len(self.p0),
            "label_1": len(self.n),
            "label_2": len(self.p2),
            "total": self.size,
        }


def _embedded_matrix(train: Dataset) -> np.ndarray:
    return train.embedding_matrix()


def axis_embeddings(train: Dataset) -> AxisEmbeddings:
    """
    Class centroids of the training embeddings.

    >>> from axiscascade.data.dataset import Document
    >>> ds = Dataset([Document("a", label=1, embedding=[1.0, 0.0]),
    ...               Document("b", label=1, embedding=[0.0, 1.0]),
    ...               Document("c", label=0, embedding=[-1.0, -1.0])])
    >>> axis_embeddings(ds).emb1
    array([0.5, 0.5])
    """
    labels = train.labels()
    X = _embedded_matrix(train)
    for label in (0, 1):
        if not np.any(labels == label):
            raise ValidationError(
                f"cannot compute axis embeddings: no training records with label "
                f"{label}"
            )
    return AxisEmbeddings(
        emb0=X[labels == 0].mean(axis=0), emb1=X[labels == 1].mean(axis=0)
    )


def axis_margins(train: Dataset, axes: AxisEmbeddings) -> np.ndarray:
    """``cos(x, emb1) - cos(x, emb0)`` for every record, in dataset order."""
    X = _embedded_matrix(train)
    if len(train) and X.shape[1] != axes.dim:
        raise DimensionMismatchError(
            f"records have dim {X.shape[1]}, axis embeddings have dim {axes.dim}"
        )
    if not len(train):
        return np.zeros(0)
    return cosine_rows(X, axes.emb1) - cosine_rows(X, axes.emb0)


def assign_axis(
    train: Dataset, axes: AxisEmbeddings, cfg: ThresholdConfig
) -> TrainPartition:
    """
    Splits gold positives by the axis rule; gold negatives always go to ``n``.
    """
    labels = train.labels()
    margins = axis_margins(train, axes)
    ids = train.ids
    p0, p2, n = set(), set(), set()
    for doc_id, label, margin in zip(ids, labels, margins):
        if label == 1:
            n.add(doc_id)
        elif margin > cfg.t:
            p2.add(doc_id)
        else:
            p0.add(doc_id)
    part = TrainPartition(p0=p0, p2=p2, n=n, method_tag=cfg.tag)
    _logger.info("%s partition: %s", cfg.tag, part.counts())
    return part


def partition_from_assignment(
    train: Dataset, assignment: Iterable[int], method_tag: str
) -> TrainPartition:
    """
    Applies the clustering rule to a precomputed cluster assignment (one
    label per record, ``-1`` for noise).
    """
    labels = train.labels()
    assignment = np.asarray(list(assignment), dtype=int)
    if assignment.shape != labels.shape:
        raise DimensionMismatchError(
            f"{assignment.shape[0]} cluster labels for {labels.shape[0]} records"
        )
    clustered = assignment >= 0
    cluster_ids = sorted(set(int(a) for a in assignment[clustered]))
    if len(cluster_ids) == 1 and np.all(clustered):
        raise DegenerateClusteringError(
            f"{method_tag} put every training record into one cluster"
        )
    neg_counts = {
        c: int(np.sum((assignment == c) & (labels == 1))) for c in cluster_ids
    }
    if not neg_counts or max(neg_counts.values()) == 0:
        raise DegenerateClusteringError(
            f"{method_tag} left no gold negative inside any cluster"
        )
    best = min(cluster_ids, key=lambda c: (-neg_counts[c], c))
    p0, p2, n = set(), set(), set()
    for doc_id, label, c in zip(train.ids, labels, assignment):
        if label == 1:
            n.add(doc_id)
        elif c == best:
            p2.add(doc_id)
        else:
            p0.add(doc_id)
    return TrainPartition(p0=p0, p2=p2, n=n, method_tag=method_tag)


def assign_cluster(
    train: Dataset, method: ClusterMethod, seed: int = 0
) -> TrainPartition:
    """
    Clusters the training embeddings with ``method`` and applies the
    clustering rule.

    :raises DegenerateClusteringError: one cluster holds every record, or no
        cluster holds a gold negative.
    """
    result = cluster(_embedded_matrix(train), method, seed=seed)
    part = partition_from_assignment(
        train, result.assignment, f"{method.tag},seed={seed}"
    )
    _logger.info("%s partition: %s", part.method_tag, part.counts())
    return part


def _check_covers(part: TrainPartition, train: Dataset) -> None:
    ids = set(train.ids)
    covered = part.p0 | part.p2 | part.n
    if covered != ids:
        raise ValidationError(
            f"Partition does not match the training records:\n"
            f"    missing from partition: {len(ids - covered)}\n"
            f"    unknown to training:    {len(covered - ids)}"
        )


def build_nd1(part: TrainPartition, train: Dataset) -> Dataset:
    """First-stage training set: ``p0`` as 0, ``p2`` and ``n`` as 1."""
    _check_covers(part, train)
    labels = {doc_id: 0 for doc_id in part.p0}
    labels.update({doc_id: 1 for doc_id in part.p2 | part.n})
    return train.relabel(labels)


def build_nd2(part: TrainPartition, train: Dataset) -> Dataset:
    """
    Second-stage training set: ``p2`` as 0 and ``n`` as 1; ``p0`` is left out.

    :raises DegenerateStageError: ``p2`` or ``n`` is empty.
    """
    _check_covers(part, train)
    if not part.p2:
        raise DegenerateStageError(
            f"degenerate second stage: {part.method_tag} produced no label-2 "
            f"records; fall back to a single-stage model"
        )
    if not part.n:
        raise DegenerateStageError(
            "degenerate second stage: no negative training records; fall back "
            "to a single-stage model"
        )
    labels = {doc_id: 0 for doc_id in part.p2}
    labels.update({doc_id: 1 for doc_id in part.n})
    return train.relabel(labels)


def partition_frame(part: TrainPartition, train: Dataset) -> pd.DataFrame:
    _check_covers(part, train)
    return pd.DataFrame(
        {
            "id": list(train.ids),
            "gold_label": [doc.label for doc in train],
            "partition": [part.group_of(doc.id) for doc in train],
        }
    )


def export_partition(
    part: TrainPartition, train: Dataset, path: Union[str, Path]
) -> Path:
    """Writes the ``id, gold_label, partition`` audit table as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    partition_frame(part, train).to_csv(path, index=False, lineterminator="\n")
    return path
