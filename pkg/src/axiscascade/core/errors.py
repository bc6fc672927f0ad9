"""
Exception hierarchy for `axiscascade`.

Every error raised on purpose by this package derives from `.CascadeError`.
Errors caused by bad inputs (files, configs, hyperparameters, shapes) also
derive from `ValueError` via `.ValidationError`; the CLI maps those to exit
code 1 and every other failure to exit code 2.

>>> issubclass(DuplicateIdError, ValueError)
True
>>> issubclass(DegenerateStageError, ValueError)
False
"""

from typing import Optional

__all__ = [
    "BundleError",
    "CascadeError",
    "ClusteringError",
    "ConfigError",
    "DatasetFormatError",
    "DegenerateClusteringError",
    "DegenerateStageError",
    "DimensionMismatchError",
    "DuplicateIdError",
    "DuplicateTokenWarning",
    "FeatureSchemaError",
    "HyperparameterError",
    "LexiconFormatError",
    "MissingEmbeddingError",
    "ResampleError",
    "SingleClassError",
    "SingularDesignError",
    "StageError",
    "UnlabeledRecordError",
    "UnscorableRecordError",
    "ValidationError",
]


class CascadeError(Exception):
    """Base class for all errors raised on purpose by `axiscascade`."""


class ValidationError(CascadeError, ValueError):
    """Bad input: a malformed file, config, shape, or argument."""


class DatasetFormatError(ValidationError):
    """
    A line of a record file could not be parsed.

    >>> err = DatasetFormatError("bad json", path="x.jsonl", line=3)
    >>> err.line
    3
    >>> print(err)
    x.jsonl:3: bad json
    """

    def __init__(
        self, message: str, *, path: Optional[str] = None, line: Optional[int] = None
    ):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
        if line is not None:
            prefix = f"{prefix}{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class DimensionMismatchError(DatasetFormatError):
    """
    Vectors of different lengths were mixed, or a model or encoder was given
    inputs with the wrong number of columns.
    """


class DuplicateIdError(DatasetFormatError):
    """Two records in one dataset share an id."""


class LexiconFormatError(DatasetFormatError):
    """A word-vector or resource file is malformed or empty."""


class UnlabeledRecordError(ValidationError):
    """An operation that needs gold labels was given an unlabeled record."""


class MissingEmbeddingError(ValidationError):
    """An operation that needs embeddings was given a record without one."""


class FeatureSchemaError(ValidationError):
    """Feature names or counts differ from the ones a pipeline was fitted on."""


class ConfigError(ValidationError):
    """A run or grid config is invalid."""


class HyperparameterError(ValidationError):
    """A model or resampling hyperparameter is unknown or out of range."""


class ResampleError(ValidationError):
    """Resampling preconditions (class sizes, neighbor counts) are not met."""


class DegenerateStageError(CascadeError):
    """
    The label-2 set is empty, so the second-stage training set cannot be
    built. Callers should fall back to a single-stage model.
    """


class SingleClassError(CascadeError):
    """A discriminative model was asked to train on a single class."""


class ClusteringError(CascadeError):
    """A clustering run failed or was given unusable inputs."""


class DegenerateClusteringError(ClusteringError):
    """Clustering collapsed (identical points, or one cluster holding everything)."""


class SingularDesignError(CascadeError):
    """A regression design matrix is rank deficient or badly conditioned."""


class UnscorableRecordError(CascadeError):
    """A record lacks what a trained bundle needs to score it."""


class BundleError(CascadeError):
    """A bundle file is unreadable, of the wrong kind, or of an unknown version."""


class StageError(CascadeError):
    """
    Wraps an error raised while running one stage of the end-to-end pipeline,
    keeping the original as ``__cause__``.

    >>> err = StageError("split", ValueError("boom"))
    >>> err.stage
    'split'
    >>> print(err)
    pipeline stage 'split' failed: ValueError: boom
    """

    def __init__(self, stage: str, original: BaseException):
        self.stage = stage
        self.original = original
        super().__init__(
            f"pipeline stage {stage!r} failed: "
            f"{type(original).__name__}: {original}"
        )

    @property
    def is_validation(self) -> bool:
        return isinstance(self.original, ValidationError)


class DuplicateTokenWarning(UserWarning):
    """A word-vector file defines the same token more than once."""
