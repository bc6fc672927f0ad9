"""
The base classifier zoo.

Every kind shares one contract: `.train` a `.ModelSpec` on a matrix and 0/1
labels to get a `.TrainedModel`, then `.score` rows (probability of label 1)
or `.predict` them (label 1 where the score is at least 0.5). Kinds are
plugins; see `axiscascade.models.registry`.
"""

from axiscascade.models.base import ModelSpec, TrainedModel, predict, score, train
from axiscascade.models.registry import (
    filter_hyperparams,
    get_kind,
    get_kind_names,
    register_kind,
)

__all__ = [
    "ModelSpec",
    "TrainedModel",
    "filter_hyperparams",
    "get_kind",
    "get_kind_names",
    "predict",
    "register_kind",
    "score",
    "train",
]
