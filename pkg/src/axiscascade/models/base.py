"""
The uniform train / predict / score contract over every registered kind.
"""

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Dict, Mapping

import numpy as np

from axiscascade.core.errors import (
    DimensionMismatchError,
    HyperparameterError,
    SingleClassError,
    ValidationError,
)
from axiscascade.models.registry import get_kind

__all__ = ["ModelSpec", "TrainedModel", "predict", "score", "train"]

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelSpec:
    """
    A model kind plus hyperparameter overrides and a seed.

    Hyperparameters are validated against the kind when the spec is built.

    >>> ModelSpec("knn", {"k": 3}).resolved_hyperparams
    {'k': 3}
    >>> ModelSpec("knn", {"k": 0})
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.HyperparameterError: Bad hyperparameter for 'knn':...
    """

    kind: str
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        entry = get_kind(self.kind)
        if not isinstance(self.hyperparams, Mapping):
            raise HyperparameterError(
                f"Hyperparameters must be a mapping, got {self.hyperparams!r}"
            )
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise HyperparameterError(
                f"Seed must be an integer >= 0:\n    seed: {self.seed!r}"
            )
        entry.validate(self.kind, self.hyperparams)
        frozen = MappingProxyType(dict(self.hyperparams))
        object.__setattr__(self, "hyperparams", frozen)

    @property
    def resolved_hyperparams(self) -> Dict[str, Any]:
        """Kind defaults overlaid with this spec's overrides."""
        return {**get_kind(self.kind).hyperparams, **self.hyperparams}

    @property
    def tag(self) -> str:
        """
        >>> ModelSpec("rf", {"n_trees": 5}).tag
        'rf(n_trees=5)'
        """
        args = ",".join(f"{k}={v}" for k, v in sorted(self.hyperparams.items()))
        return f"{self.kind}({args})"

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ModelSpec":
        if not isinstance(raw, Mapping) or "kind" not in raw:
            raise HyperparameterError(f"A model spec needs a 'kind':\n    got: {raw!r}")
        extra = set(raw) - {"kind", "hyperparams", "seed"}
        if extra:
            raise HyperparameterError(f"Unknown model spec keys: {sorted(extra)}")
        hyperparams = dict(raw.get("hyperparams", {}))
        return cls(raw["kind"], hyperparams, int(raw.get("seed", 0)))

    def as_dict(self) -> Dict[str, Any]:
        hyperparams = dict(self.hyperparams)
        return {"kind": self.kind, "hyperparams": hyperparams, "seed": self.seed}

    def __getstate__(self):
        return self.as_dict()

    def __setstate__(self, state):
        object.__setattr__(self, "kind", state["kind"])
        object.__setattr__(self, "hyperparams", MappingProxyType(state["hyperparams"]))
        object.__setattr__(self, "seed", state["seed"])


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """
    A fitted model. ``params`` is kind-specific; ``metadata`` holds ``epochs``
    and ``final_loss`` and, for iterative kinds, ``loss_history``.
    """

    spec: ModelSpec
    input_dim: int
    params: Any = field(repr=False)
    metadata: Mapping[str, Any] = field(default_factory=dict, repr=False)

    @property
    def kind(self) -> str:
        return self.spec.kind

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise DimensionMismatchError(
                f"Model input has the wrong shape:\n"
                f"    kind: {self.kind}\n"
                f"    fitted dimension: {self.input_dim}\n"
                f"    got shape: {X.shape}"
            )
        return X

    def score(self, X) -> np.ndarray:
        """Probabilities of label 1, in ``[0, 1]``."""
        X = self._check(X)
        if len(X) == 0:
            return np.empty(0)
        return np.clip(get_kind(self.kind).score(self.params, X), 0.0, 1.0)

    def predict(self, X) -> np.ndarray:
        """Label 1 exactly where the score is at least 0.5."""
        return (self.score(X) >= 0.5).astype(int)


def _check_training_data(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2:
        raise DimensionMismatchError(
            f"Training inputs must be a matrix, got shape {X.shape}"
        )
    if len(X) != len(y) or len(y) == 0:
        raise ValidationError(
            f"Training inputs and labels must be non-empty and of equal length:\n"
            f"    rows: {len(X)}\n"
            f"    labels: {len(y)}"
        )
    if not np.isfinite(X).all():
        raise ValidationError("Training inputs contain non-finite values")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError(f"Labels must be 0 or 1, got {sorted(set(y.tolist()))}")
    return X, y.astype(int)


def train(spec: ModelSpec, X, y) -> TrainedModel:
    """
    Fits ``spec`` on ``X`` and 0/1 labels ``y``. Deterministic given
    ``spec.seed`` and the data.
    """
    X, y = _check_training_data(X, y)
    entry = get_kind(spec.kind)
    if entry.requires_both_classes and len(np.unique(y)) < 2:
        raise SingleClassError(
            f"Model kind {spec.kind!r} needs both classes in its training data:\n"
            f"    rows: {len(y)}\n"
            f"    label: {int(y[0])}"
        )
    rng = np.random.default_rng(spec.seed)
    params, metadata = entry.fit(X, y, rng, **spec.hyperparams)
    _logger.debug(
        "trained %s on %d rows: final loss %s",
        spec.tag,
        len(y),
        metadata.get("final_loss"),
    )
    return TrainedModel(
        spec=spec,
        input_dim=X.shape[1],
        params=params,
        metadata=dict(metadata),
    )


def predict(model: TrainedModel, X) -> np.ndarray:
    return model.predict(X)


def score(model: TrainedModel, X) -> np.ndarray:
    return model.score(X)
