"""
Linear classifier trained by mini-batch SGD on the modified Huber loss with an
L2 penalty on the weights. Margins are squashed by a fitted logistic map.
"""

import numpy as np

from axiscascade.models.api import ModelKind, nonnegative, positive, positive_int
from axiscascade.models.linear import fit_platt


def _modified_huber(z):
    return np.where(z >= -1.0, np.maximum(0.0, 1.0 - z) ** 2, -4.0 * z)


def _modified_huber_slope(z):
    return np.where(z >= 1.0, 0.0, np.where(z >= -1.0, -2.0 * (1.0 - z), -4.0))


def fit(X, y, rng, *, learning_rate=0.01, epochs=20, alpha=1e-4, batch_size=8):
    n, d = X.shape
    t = 2.0 * y - 1.0
    w = np.zeros(d)
    b = 0.0
    history = []
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            slope = _modified_huber_slope(t[batch] * (X[batch] @ w + b)) * t[batch]
            w -= learning_rate * (slope @ X[batch] / len(batch) + alpha * w)
            b -= learning_rate * slope.mean()
        z = t * (X @ w + b)
        history.append(float(_modified_huber(z).mean() + 0.5 * alpha * (w @ w)))
    params = {"w": w, "b": float(b), "platt": fit_platt(X @ w + b, y)}
    metadata = {"epochs": epochs, "final_loss": history[-1], "loss_history": history}
    return params, metadata


def score(params, X):
    return params["platt"](X @ params["w"] + params["b"])


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={
        "learning_rate": positive,
        "epochs": positive_int,
        "alpha": nonnegative,
        "batch_size": positive_int,
    },
)
