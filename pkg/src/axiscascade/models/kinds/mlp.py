"""
One-hidden-layer perceptron: rectifier hidden units, logistic output,
cross-entropy loss, constant-step mini-batch gradient descent.
"""

from typing import Dict, Tuple

import numpy as np
from scipy.special import expit

from axiscascade.models.api import ModelKind, nonnegative, positive, positive_int
from axiscascade.models.linear import log_loss

Params = Dict[str, np.ndarray]


def init_params(d: int, hidden: int, rng: np.random.Generator) -> Params:
    """He-initialized weights, zero biases."""
    return {
        "W1": rng.normal(0.0, np.sqrt(2.0 / d), size=(d, hidden)),
        "b1": np.zeros(hidden),
        "W2": rng.normal(0.0, np.sqrt(1.0 / hidden), size=hidden),
        "b2": np.zeros(1),
    }


def forward(params: Params, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Returns ``(hidden activations, output logits)``."""
    hidden = np.maximum(0.0, X @ params["W1"] + params["b1"])
    return hidden, hidden @ params["W2"] + params["b2"][0]


def loss_and_grad(
    params: Params, X: np.ndarray, y: np.ndarray, l2: float = 0.0
) -> Tuple[float, Params]:
    """
    Mean cross-entropy plus ``l2 / 2`` times the squared weight norms, and its
    gradient with respect to every parameter.
    """
    n = len(X)
    pre = X @ params["W1"] + params["b1"]
    hidden = np.maximum(0.0, pre)
    logits = hidden @ params["W2"] + params["b2"][0]
    loss = log_loss(y, logits) + 0.5 * l2 * (
        np.sum(params["W1"] ** 2) + np.sum(params["W2"] ** 2)
    )
    d_logits = (expit(logits) - y) / n
    d_hidden = np.outer(d_logits, params["W2"]) * (pre > 0)
    grads = {
        "W1": X.T @ d_hidden + l2 * params["W1"],
        "b1": d_hidden.sum(axis=0),
        "W2": hidden.T @ d_logits + l2 * params["W2"],
        "b2": np.array([d_logits.sum()]),
    }
    return float(loss), grads


def fit(X, y, rng, *, hidden=16, learning_rate=0.1, epochs=200, batch_size=32, l2=0.0):
    n, d = X.shape
    y = y.astype(float)
    params = init_params(d, hidden, rng)
    history = []
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            _, grads = loss_and_grad(params, X[batch], y[batch], l2)
            for name, grad in grads.items():
                params[name] -= learning_rate * grad
        history.append(loss_and_grad(params, X, y, l2)[0])
    metadata = {"epochs": epochs, "final_loss": history[-1], "loss_history": history}
    return params, metadata


def score(params, X):
    return expit(forward(params, X)[1])


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={
        "hidden": positive_int,
        "learning_rate": positive,
        "epochs": positive_int,
        "batch_size": positive_int,
        "l2": nonnegative,
    },
)
