"""
Linear SVM trained with the Pegasos schedule: mini-batch subgradient steps on
the hinge loss with step ``1 / (lam * t)`` and projection onto the ball of
radius ``1 / sqrt(lam)``. The bias is an extra, penalized input column.
"""

import numpy as np

from axiscascade.models.api import ModelKind, positive, positive_int
from axiscascade.models.linear import add_intercept, fit_platt


def _objective(Xa, t, w, lam):
    hinge = np.maximum(0.0, 1.0 - t * (Xa @ w))
    return float(0.5 * lam * (w @ w) + hinge.mean())


def fit(X, y, rng, *, lam=0.01, epochs=20, batch_size=8):
    n = len(X)
    Xa = add_intercept(X)
    t = 2.0 * y - 1.0
    w = np.zeros(Xa.shape[1])
    radius = 1.0 / np.sqrt(lam)
    step = 0
    history = []
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            step += 1
            eta = 1.0 / (lam * step)
            viol = batch[t[batch] * (Xa[batch] @ w) < 1.0]
            w *= 1.0 - eta * lam
            if len(viol):
                w += (eta / len(batch)) * (t[viol] @ Xa[viol])
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
        history.append(_objective(Xa, t, w, lam))
    margins = Xa @ w
    params = {"w": w[:-1].copy(), "b": float(w[-1]), "platt": fit_platt(margins, y)}
    metadata = {"epochs": epochs, "final_loss": history[-1], "loss_history": history}
    return params, metadata


def score(params, X):
    return params["platt"](X @ params["w"] + params["b"])


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={"lam": positive, "epochs": positive_int, "batch_size": positive_int},
)
