"""Uncertainty sampling: the pool records a trained predictor is least sure of."""

import logging
from typing import List

import numpy as np

from axiscascade.cascade import Predictor
from axiscascade.core.errors import UnscorableRecordError, ValidationError
from axiscascade.data.dataset import Dataset

__all__ = ["check_scorable", "select_uncertain", "uncertainty_order"]

_logger = logging.getLogger(__name__)


def check_scorable(predictor: Predictor, pool: Dataset) -> None:
    """
    :raises UnscorableRecordError: a record lacks the embedding the
        predictor's encoder reads.
    """
    encoder = predictor.encoder
    if encoder is not None and not encoder.use_embedding:
        return
    for doc in pool:
        if doc.embedding is None:
            raise UnscorableRecordError(
                f"record {doc.id!r} has no embedding; embed the pool first"
            )


def uncertainty_order(ids, scores) -> List[str]:
    """
    Ids sorted by ``|score - 0.5|``, ties by id.

    >>> uncertainty_order(["a", "b", "c"], [0.9, 0.5, 0.25])
    ['b', 'c', 'a']
    >>> uncertainty_order(["b", "a"], [0.7, 0.7])
    ['a', 'b']
    """
    distance = np.abs(np.asarray(scores, dtype=float) - 0.5)
    return [doc_id for _, doc_id in sorted(zip(distance.tolist(), ids))]


def select_uncertain(predictor: Predictor, pool: Dataset, n: int) -> List[str]:
    """
    The ``n`` pool ids whose scores are nearest 0.5. For a cascade the score
    is stage A's where stage A says 0 and stage B's elsewhere.
    """
    if not isinstance(n, int) or not 0 <= n <= len(pool):
        raise ValidationError(f"n must be in [0, {len(pool)}], got {n!r}")
    if n == 0:
        return []
    check_scorable(predictor, pool)
    scores = predictor.score_records(pool)
    chosen = uncertainty_order(pool.ids, scores)[:n]
    _logger.info("selected %d of %d pool records", len(chosen), len(pool))
    return chosen
