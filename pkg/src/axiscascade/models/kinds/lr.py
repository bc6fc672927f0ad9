"""
Logistic regression fitted by L-BFGS on the L2-penalized mean log-loss. The
intercept is not penalized.
"""

import numpy as np
from scipy.optimize import minimize

from axiscascade.models.api import ModelKind, nonnegative, positive, positive_int
from axiscascade.models.linear import add_intercept, log_loss, sigmoid


def fit(X, y, rng, *, l2=1e-4, max_iter=1000, tol=1e-10):
    n, d = X.shape
    Xa = add_intercept(X)
    penalty = np.r_[np.ones(d), 0.0]

    def objective(theta):
        z = Xa @ theta
        loss = log_loss(y, z) + 0.5 * l2 * np.sum(penalty * theta * theta)
        grad = Xa.T @ (sigmoid(z) - y) / n + l2 * penalty * theta
        return loss, grad

    res = minimize(
        objective,
        np.zeros(d + 1),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "gtol": tol},
    )
    params = {"w": res.x[:-1].copy(), "b": float(res.x[-1])}
    return params, {"epochs": int(res.nit), "final_loss": float(res.fun)}


def score(params, X):
    return sigmoid(X @ params["w"] + params["b"])


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={"l2": nonnegative, "max_iter": positive_int, "tol": positive},
)
