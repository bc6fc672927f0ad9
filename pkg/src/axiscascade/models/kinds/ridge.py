"""
Ridge classifier: closed-form least squares on ``±1`` targets with an
unpenalized intercept, scored through a logistic map of the margin.
"""

import numpy as np

from axiscascade.models.api import ModelKind, positive
from axiscascade.models.linear import fit_platt


def fit(X, y, rng, *, lam=1.0):
    t = 2.0 * y - 1.0
    x_mean = X.mean(axis=0)
    t_mean = t.mean()
    Xc = X - x_mean
    gram = Xc.T @ Xc + lam * np.eye(X.shape[1])
    w = np.linalg.solve(gram, Xc.T @ (t - t_mean))
    b = float(t_mean - x_mean @ w)
    margins = X @ w + b
    loss = float(np.mean((t - margins) ** 2) + lam * (w @ w) / len(X))
    params = {"w": w, "b": b, "platt": fit_platt(margins, y)}
    return params, {"epochs": 1, "final_loss": loss}


def score(params, X):
    return params["platt"](X @ params["w"] + params["b"])


ENTRY_POINT = ModelKind(fit=fit, score=score, checks={"lam": positive})
