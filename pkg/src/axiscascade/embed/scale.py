"""
Column standardization fitted on training rows.
"""

from dataclasses import dataclass

import numpy as np

from axiscascade.core.errors import DimensionMismatchError, ValidationError

__all__ = ["Scaler", "standardize_apply", "standardize_fit"]


@dataclass(frozen=True, eq=False)
class Scaler:
    """
    Per-column mean and scale. Constant columns have scale 1, so applying the
    scaler only centers them.
    """

    mean: np.ndarray
    scale: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])


def standardize_fit(X) -> Scaler:
    """
    Fits a z-score scaler with the population standard deviation.

    >>> s = standardize_fit([[0.0, 5.0], [2.0, 5.0]])
    >>> standardize_apply(s, [[0.0, 5.0], [2.0, 5.0]])
    array([[-1.,  0.],
           [ 1.,  0.]])
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError(f"cannot fit a scaler on an empty matrix {X.shape}")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = np.ptp(X, axis=0) == 0
    # Use the shared value itself so constant columns center to exact zeros.
    mean[constant] = X[0, constant]
    scale = np.where(constant | (std == 0), 1.0, std)
    return Scaler(mean=mean, scale=scale)


def standardize_apply(scaler: Scaler, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != scaler.dim:
        raise DimensionMismatchError(
            f"scaler fitted on {scaler.dim} columns, got shape {X.shape}"
        )
    return (X - scaler.mean) / scaler.scale
