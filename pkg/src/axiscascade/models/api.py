"""
Defines the plugin API for model kinds.

Each module in the `axiscascade.models.kinds` package defines an
``ENTRY_POINT`` global that is a `.ModelKind`. The kind's name is the module
name. `axiscascade.models.registry` discovers all of them at import time.

A kind is two functions:

- ``fit(X, y, rng, *, <hyperparameters with defaults>) -> (params, metadata)``
- ``score(params, X) -> probabilities of label 1``

The hyperparameters a kind accepts, and their defaults, are read from the
keyword-only parameters of its ``fit`` function by `.extract_hyperparams`.
"""

from dataclasses import dataclass, field
from inspect import Parameter, signature
from typing import Any, Callable, Dict, Mapping, Tuple

import numpy as np

from axiscascade.core.errors import HyperparameterError

__all__ = [
    "Check",
    "boolean",
    "ModelKind",
    "extract_hyperparams",
    "fraction",
    "nonnegative",
    "optional_fraction",
    "optional_positive_int",
    "positive",
    "positive_int",
]

FitFunc = Callable[..., Tuple[Any, Dict[str, Any]]]
ScoreFunc = Callable[[Any, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Check:
    """A named predicate over one hyperparameter value."""

    predicate: Callable[[Any], bool]
    description: str

    def __call__(self, value) -> bool:
        try:
            return bool(self.predicate(value))
        except TypeError:
            return False


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(
        v, bool
    )


positive = Check(lambda v: _is_real(v) and v > 0, "a number > 0")
nonnegative = Check(lambda v: _is_real(v) and v >= 0, "a number >= 0")
fraction = Check(lambda v: _is_real(v) and 0 < v <= 1, "a number in (0, 1]")
positive_int = Check(lambda v: _is_int(v) and v >= 1, "an integer >= 1")
optional_positive_int = Check(
    lambda v: v is None or (_is_int(v) and v >= 1), "null or an integer >= 1"
)
optional_fraction = Check(
    lambda v: v is None or (_is_real(v) and 0 < v <= 1), "null or a number in (0, 1]"
)
boolean = Check(lambda v: isinstance(v, bool), "true or false")


def extract_hyperparams(fit: Callable) -> Dict[str, Any]:
    """
    Inspects a kind's ``fit`` function and returns its hyperparameters with
    their defaults.

    >>> def fit(X, y, rng, *, lr=0.1, epochs=10):
    ...     pass
    >>> extract_hyperparams(fit)
    {'lr': 0.1, 'epochs': 10}

    :param fit: a function whose first three parameters are the positional
        ``X``, ``y`` and ``rng``, and whose other parameters are keyword-only
        with defaults.
    """
    params = list(signature(fit).parameters.items())
    expected = ("X", "y", "rng")
    head = tuple(name for name, _ in params[: len(expected)])
    if head != expected:
        raise TypeError(
            f"A model fit function must start with parameters {expected}:\n"
            f"    function:   {fit}\n"
            f"    parameters: {head}\n"
        )
    hyperparams = {}
    for name, spec in params[len(expected) :]:
        if spec.kind is not Parameter.KEYWORD_ONLY:
            raise TypeError(f"Hyperparameter {name!r} of {fit} must be keyword-only.")
        if spec.default is Parameter.empty:
            raise TypeError(f"Hyperparameter {name!r} of {fit} has no default.")
        hyperparams[name] = spec.default
    return hyperparams


@dataclass(frozen=True)
class ModelKind:
    """
    The entry point of one model kind.

    :param requires_both_classes: whether training on a single class is an
        error. Permissive kinds (``gnb``, ``knn``) then score the one class
        everywhere.
    """

    fit: FitFunc
    score: ScoreFunc
    checks: Mapping[str, Check] = field(default_factory=dict)
    requires_both_classes: bool = True

    @property
    def hyperparams(self) -> Dict[str, Any]:
        return extract_hyperparams(self.fit)

    def validate(self, kind: str, hyperparams: Mapping[str, Any]) -> None:
        allowed = self.hyperparams
        for name, value in hyperparams.items():
            if name not in allowed:
                raise HyperparameterError(
                    f"Model kind {kind!r} has no hyperparameter {name!r}:\n"
                    f"    allowed: {sorted(allowed)}"
                )
            check = self.checks.get(name)
            if check is not None and not check(value):
                raise HyperparameterError(
                    f"Bad hyperparameter for {kind!r}:\n"
                    f"    {name}: {value!r}\n"
                    f"    expected {check.description}"
                )
