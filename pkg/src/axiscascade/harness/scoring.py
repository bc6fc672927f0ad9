"""Labels an unlabeled corpus with a trained predictor."""

import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd

from axiscascade.cascade import Predictor
from axiscascade.data.dataset import Dataset
from axiscascade.harness.active import check_scorable
from axiscascade.harness.reports import write_json

__all__ = ["SCORE_COLUMNS", "score_corpus"]

_logger = logging.getLogger(__name__)

SCORE_COLUMNS = ("id", "predicted_label", "score", "stage_a_score", "stage_b_score")


def score_corpus(
    predictor: Predictor, pool: Dataset, output: Union[str, Path]
) -> Dict[str, int]:
    """
    Writes one CSV row per pool record (predicted label, final score and both
    stage scores, the stage-B score empty where stage A stopped the record)
    and a ``<output>.summary.json`` next to it.

    :return: the summary counts: ``total``, ``label_0``, ``label_1`` and
        ``routed_to_stage_b``.
    """
    output = Path(output)
    check_scorable(predictor, pool)
    if len(pool):
        X = predictor.encode(pool)
        score_a, score_b = predictor.stage_scores(X)
        labels = predictor.predict(X)
        scores = predictor.score(X)
    else:
        score_a = score_b = scores = np.empty(0)
        labels = np.empty(0, dtype=int)
    frame = pd.DataFrame(
        {
            "id": list(pool.ids),
            "predicted_label": labels.astype(int),
            "score": scores,
            "stage_a_score": score_a,
            "stage_b_score": score_b,
        },
        columns=list(SCORE_COLUMNS),
    )
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, lineterminator="\n")
    summary = {
        "total": len(pool),
        "label_0": int(np.sum(labels == 0)),
        "label_1": int(np.sum(labels == 1)),
        "routed_to_stage_b": int(np.sum(~np.isnan(score_b))),
    }
    write_json(output.with_name(output.name + ".summary.json"), summary)
    _logger.info("scored %d records: %s", len(pool), summary)
    return summary
