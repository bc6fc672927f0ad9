"""
Manages the registry of model kinds.

Each module in the `axiscascade.models.kinds` package must have a global
variable called ``ENTRY_POINT`` that is a `~axiscascade.models.api.ModelKind`.
The kind's name is the module's name, after ``"axiscascade.models.kinds."``.
This registry auto-discovers all such entry points at import time; third
party kinds can be added with `.register_kind`.

Handling Hyperparameters
------------------------

Grid searches share one hyperparameter map across every kind they try.
`.filter_hyperparams` routes it: keys another kind accepts are silently
dropped, and keys no registered kind accepts are an error.
"""

import importlib
import pkgutil
from typing import Any, Dict, Mapping, Set, Tuple

from axiscascade.core.errors import HyperparameterError
from axiscascade.models.api import ModelKind

__all__ = [
    "filter_hyperparams",
    "get_all_hyperparams",
    "get_kind",
    "get_kind_names",
    "register_kind",
]

_KINDS: Dict[str, ModelKind] = {}
_ALL_HYPERPARAMS: Set[str] = set()


def register_kind(name: str, entry_point: ModelKind) -> None:
    """Registers a new or replacement model kind under ``name``."""
    if not isinstance(entry_point, ModelKind):
        raise TypeError(f"{entry_point=} must be a ModelKind")
    unknown_checks = set(entry_point.checks) - set(entry_point.hyperparams)
    if unknown_checks:
        raise TypeError(
            f"The kind {name!r} checks hyperparameters its fit function does not "
            f"take: {sorted(unknown_checks)}"
        )
    _KINDS[name] = entry_point
    _ALL_HYPERPARAMS.update(entry_point.hyperparams)


def get_kind(name: str) -> ModelKind:
    """
    >>> get_kind("not-a-kind")
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.HyperparameterError: Unknown model kind: 'not-a-kind'...
    """
    try:
        return _KINDS[name]
    except KeyError:
        raise HyperparameterError(
            f"Unknown model kind: {name!r}\n    known kinds: {sorted(_KINDS)}"
        ) from None


def get_kind_names() -> Tuple[str, ...]:
    """
    >>> get_kind_names()
    ('dtree', 'gboost', 'gnb', 'knn', 'lr', 'mlp', 'rf', 'ridge',
     'sgd_linear', 'svm_linear')
    """
    return tuple(sorted(_KINDS))


def get_all_hyperparams() -> Set[str]:
    """The union of the hyperparameter names of every registered kind."""
    return set(_ALL_HYPERPARAMS)


def filter_hyperparams(kind: str, hyperparams: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Keeps the entries of a shared hyperparameter map that ``kind`` accepts.

        >>> filter_hyperparams("knn", {"k": 3, "n_trees": 10})
        {'k': 3}
        >>> filter_hyperparams("knn", {"warp_factor": 9})
        Traceback (most recent call last):
        ...
        axiscascade.core.errors.HyperparameterError: Hyperparameter 'warp_factor' ...
    """
    allowed = get_kind(kind).hyperparams
    filtered = {}
    for name, value in hyperparams.items():
        if name not in _ALL_HYPERPARAMS:
            raise HyperparameterError(
                f"Hyperparameter {name!r} is not accepted by any model kind:\n"
                f"    kinds: {sorted(_KINDS)}\n"
                f"    all hyperparameters: {sorted(_ALL_HYPERPARAMS)}"
            )
        elif name in allowed:
            filtered[name] = value
    return filtered


def _register_builtin_kinds() -> None:
    from axiscascade.models import kinds

    for modinfo in pkgutil.iter_modules(kinds.__path__):
        module = importlib.import_module(f"{kinds.__name__}.{modinfo.name}")
        register_kind(modinfo.name, module.ENTRY_POINT)


_register_builtin_kinds()
