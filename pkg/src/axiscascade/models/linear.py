"""
Helpers shared by the linear kinds: the logistic link, log-loss, and the
one-dimensional logistic map that turns raw margins into scores.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, log_expit

__all__ = ["PlattMap", "add_intercept", "fit_platt", "log_loss", "sigmoid"]

sigmoid = expit


def add_intercept(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((len(X), 1))])


def log_loss(y: np.ndarray, logits: np.ndarray) -> float:
    """
    Mean binary cross-entropy computed from logits.

    >>> round(log_loss(np.array([1.0, 0.0]), np.array([0.0, 0.0])), 6)
    0.693147
    """
    return float(-np.mean(y * log_expit(logits) + (1.0 - y) * log_expit(-logits)))


@dataclass(frozen=True)
class PlattMap:
    """``score = sigmoid(a * margin + b)``."""

    a: float
    b: float

    def __call__(self, margins: np.ndarray) -> np.ndarray:
        return sigmoid(self.a * margins + self.b)


def fit_platt(margins: np.ndarray, y: np.ndarray) -> PlattMap:
    """
    Fits a logistic map on training margins with Platt's smoothed targets,
    ``(n1 + 1) / (n1 + 2)`` for label 1 and ``1 / (n0 + 2)`` for label 0, so
    separable margins still give a finite slope.

    >>> m = np.array([-2.0, -1.0, 1.0, 2.0])
    >>> platt = fit_platt(m, np.array([0, 0, 1, 1]))
    >>> bool(platt.a > 0), round(float(platt(np.array([0.0]))[0]), 6)
    (True, 0.5)
    """
    margins = np.asarray(margins, dtype=float)
    y = np.asarray(y)
    n1 = int((y == 1).sum())
    n0 = len(y) - n1
    t = np.where(y == 1, (n1 + 1.0) / (n1 + 2.0), 1.0 / (n0 + 2.0))

    def objective(ab):
        z = ab[0] * margins + ab[1]
        p = sigmoid(z)
        loss = -np.sum(t * log_expit(z) + (1.0 - t) * log_expit(-z))
        r = p - t
        return loss, np.array([np.sum(r * margins), np.sum(r)])

    b0 = np.log((n0 + 1.0) / (n1 + 1.0))
    res = minimize(objective, np.array([0.0, -b0]), jac=True, method="L-BFGS-B")
    return PlattMap(a=float(res.x[0]), b=float(res.x[1]))
