"""
The two-stage classifier.

Stage A is trained on the first-stage set (clean positives against label-2
positives plus negatives) and screens every record. Only records stage A
calls 1 reach stage B, trained on label-2 positives against negatives. The
final label is 1 exactly when both stages say 1, so stage B can only turn a
negative call back into a positive one.

`.SingleStage` wraps one model with the same interface, for baselines.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from axiscascade.core.bundle import dump_bundle, load_bundle
from axiscascade.core.errors import (
    BundleError,
    DimensionMismatchError,
    ValidationError,
)
from axiscascade.data.dataset import Dataset
from axiscascade.embed.encode import InputEncoder
from axiscascade.models import ModelSpec, TrainedModel, train
from axiscascade.resample import ResampleConfig, apply_resampling
from axiscascade.splitcraft import TrainPartition, build_nd1, build_nd2
from axiscascade.text.prep import EMPTY_RESOURCES

__all__ = [
    "Cascade",
    "SingleStage",
    "cascade_score",
    "load_predictor",
    "predict_cascade",
    "save_predictor",
    "train_cascade",
    "train_single",
]

_logger = logging.getLogger(__name__)


def _check_dim(X, input_dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != input_dim:
        raise DimensionMismatchError(
            f"Input has the wrong shape:\n"
            f"    expected columns: {input_dim}\n"
            f"    got shape:        {X.shape}"
        )
    return X


class _EncodedPredictor:
    """Record-level helpers shared by `.Cascade` and `.SingleStage`."""

    encoder: Optional[InputEncoder]

    def encode(self, ds: Dataset) -> np.ndarray:
        if self.encoder is None:
            return ds.embedding_matrix()
        return self.encoder.transform(ds)

    def predict_records(self, ds: Dataset) -> np.ndarray:
        return self.predict(self.encode(ds))

    def score_records(self, ds: Dataset) -> np.ndarray:
        return self.score(self.encode(ds))


@dataclass(frozen=True, eq=False)
class Cascade(_EncodedPredictor):
    """
    :param provenance: how the stages were trained; at least the partition
        method tag, the model specs and the partition counts.
    :param encoder: the fitted encoder both stages read their inputs from.
    """

    stage_a: TrainedModel
    stage_b: TrainedModel
    provenance: Mapping[str, Any]
    encoder: Optional[InputEncoder] = field(default=None, repr=False)

    def __post_init__(self):
        if self.stage_a.input_dim != self.stage_b.input_dim:
            raise DimensionMismatchError(
                f"Cascade stages were fitted on different input dimensions:\n"
                f"    stage A: {self.stage_a.input_dim}\n"
                f"    stage B: {self.stage_b.input_dim}"
            )
        if not self.provenance:
            raise ValidationError("a cascade needs partition provenance")

    @property
    def input_dim(self) -> int:
        return self.stage_a.input_dim

    def stage_scores(self, X) -> Tuple[np.ndarray, np.ndarray]:
        """
        Stage-A scores for every row, and stage-B scores for the rows stage A
        routes onwards (NaN elsewhere).
        """
        X = _check_dim(X, self.input_dim)
        score_a = self.stage_a.score(X)
        score_b = np.full(len(X), np.nan)
        routed = np.flatnonzero(score_a >= 0.5)
        if len(routed):
            score_b[routed] = self.stage_b.score(X[routed])
        return score_a, score_b

    def predict(self, X) -> np.ndarray:
        X = _check_dim(X, self.input_dim)
        final = np.zeros(len(X), dtype=int)
        routed = np.flatnonzero(self.stage_a.predict(X) == 1)
        if len(routed):
            final[routed] = self.stage_b.predict(X[routed])
        return final

    def score(self, X) -> np.ndarray:
        """
        Stage-A score where stage A says 0, stage-B score elsewhere, so the
        score is at least 0.5 exactly where the final label is 1.
        """
        score_a, score_b = self.stage_scores(X)
        return np.where(np.isnan(score_b), score_a, score_b)


@dataclass(frozen=True, eq=False)
class SingleStage(_EncodedPredictor):
    model: TrainedModel
    provenance: Mapping[str, Any]
    encoder: Optional[InputEncoder] = field(default=None, repr=False)

    @property
    def input_dim(self) -> int:
        return self.model.input_dim

    def stage_scores(self, X) -> Tuple[np.ndarray, np.ndarray]:
        X = _check_dim(X, self.input_dim)
        return self.model.score(X), np.full(len(X), np.nan)

    def predict(self, X) -> np.ndarray:
        return self.model.predict(_check_dim(X, self.input_dim))

    def score(self, X) -> np.ndarray:
        return self.model.score(_check_dim(X, self.input_dim))


def _default_encoder(train_ds: Dataset) -> InputEncoder:
    return InputEncoder(EMPTY_RESOURCES, features=None, use_embedding=True).fit(
        train_ds
    )


def _fit_stage(
    spec: ModelSpec,
    ds: Dataset,
    encoder: InputEncoder,
    resample_cfg: Optional[ResampleConfig],
    target: str,
) -> TrainedModel:
    X = encoder.transform(ds)
    y = ds.labels()
    if resample_cfg is not None:
        X, y = apply_resampling(X, y, resample_cfg, target)
    _logger.info("fitting %s stage %s on %d rows", target, spec.tag, len(y))
    return train(spec, X, y)


def train_cascade(
    spec_a: ModelSpec,
    spec_b: ModelSpec,
    train_ds: Dataset,
    part: TrainPartition,
    resample_cfg: Optional[ResampleConfig] = None,
    encoder: Optional[InputEncoder] = None,
) -> Cascade:
    """
    Fits stage A on the first-stage set and stage B on the second-stage set
    built from ``part``.

    :param encoder: a fitted encoder; by default the raw record embeddings.
    :raises DegenerateStageError: ``part`` has no label-2 records.
    """
    nd2 = build_nd2(part, train_ds)
    nd1 = build_nd1(part, train_ds)
    if encoder is None:
        encoder = _default_encoder(train_ds)
    stage_a = _fit_stage(spec_a, nd1, encoder, resample_cfg, "nd1")
    stage_b = _fit_stage(spec_b, nd2, encoder, resample_cfg, "nd2")
    provenance: Dict[str, Any] = {
        "method": part.method_tag,
        "partition": part.counts(),
        "stage_a": spec_a.as_dict(),
        "stage_b": spec_b.as_dict(),
        "resample": resample_cfg.as_dict() if resample_cfg else None,
        "feature_names": list(encoder.feature_names),
    }
    return Cascade(stage_a, stage_b, provenance, encoder)


def train_single(
    spec: ModelSpec,
    train_ds: Dataset,
    resample_cfg: Optional[ResampleConfig] = None,
    encoder: Optional[InputEncoder] = None,
) -> SingleStage:
    """Fits one model on the gold labels of the training split."""
    if encoder is None:
        encoder = _default_encoder(train_ds)
    model = _fit_stage(spec, train_ds, encoder, resample_cfg, "single")
    provenance = {
        "method": "single",
        "model": spec.as_dict(),
        "resample": resample_cfg.as_dict() if resample_cfg else None,
        "feature_names": list(encoder.feature_names),
    }
    return SingleStage(model, provenance, encoder)


def predict_cascade(c: Cascade, X) -> np.ndarray:
    return c.predict(X)


def cascade_score(c: Cascade, X) -> np.ndarray:
    return c.score(X)


Predictor = Union[Cascade, SingleStage]


def save_predictor(path: Union[str, Path], predictor: Predictor) -> Path:
    """Writes a cascade or single-stage model as a bundle file."""
    kind = "cascade" if isinstance(predictor, Cascade) else "model"
    return dump_bundle(path, kind, predictor, provenance=dict(predictor.provenance))


def load_predictor(path: Union[str, Path]) -> Predictor:
    """Reads a bundle written by `.save_predictor`."""
    kind = load_bundle(path, header_only=True)["kind"]
    if kind not in ("cascade", "model"):
        raise BundleError(f"{str(path)!r} holds a {kind!r} bundle, not a predictor")
    return load_bundle(path, expected_kind=kind)
