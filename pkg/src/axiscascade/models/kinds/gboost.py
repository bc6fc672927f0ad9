"""
Gradient boosting on the logistic loss with depth-limited regression trees.

Each round fits a tree to the negative gradient, sets every leaf to the Newton
step ``sum(-g) / sum(h)`` of its rows, and adds it with shrinkage. A round
whose step would raise the training log-loss is halved until it does not, and
dropped when halving fails, so the loss history never increases.
"""

import numpy as np
from scipy.special import expit, logit

from axiscascade.models.api import ModelKind, fraction, positive, positive_int
from axiscascade.models.linear import log_loss
from axiscascade.models.trees import grow_tree

_MAX_HALVINGS = 20
_HESSIAN_FLOOR = 1e-12


def fit(
    X,
    y,
    rng,
    *,
    n_rounds=100,
    shrinkage=0.1,
    max_depth=3,
    subsample=1.0,
    min_samples_leaf=1,
):
    n = len(X)
    y = y.astype(float)
    base = float(logit(np.clip(y.mean(), 1e-6, 1 - 1e-6)))
    F = np.full(n, base)
    loss = log_loss(y, F)
    history = [loss]
    stages = []
    m = max(1, int(round(subsample * n)))
    for _ in range(n_rounds):
        p = expit(F)
        g = p - y
        h = p * (1.0 - p)
        rows = np.sort(rng.choice(n, size=m, replace=False)) if m < n else np.arange(n)
        g_r, h_r = g[rows], h[rows]

        def newton_leaf(idx, g_r=g_r, h_r=h_r):
            return -g_r[idx].sum() / max(h_r[idx].sum(), _HESSIAN_FLOOR)

        tree = grow_tree(
            X[rows],
            -g_r,
            rng,
            criterion="mse",
            max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
            leaf_value=newton_leaf,
        )
        step = tree.predict(X)
        scale = shrinkage
        for _ in range(_MAX_HALVINGS):
            candidate = log_loss(y, F + scale * step)
            if candidate <= loss:
                break
            scale /= 2.0
        else:
            history.append(loss)
            continue
        F = F + scale * step
        loss = candidate
        history.append(loss)
        stages.append((scale, tree))
    params = {"base": base, "stages": stages}
    return params, {"epochs": n_rounds, "final_loss": loss, "loss_history": history}


def raw_score(params, X):
    F = np.full(len(X), params["base"])
    for scale, tree in params["stages"]:
        F += scale * tree.predict(X)
    return F


def score(params, X):
    return expit(raw_score(params, X))


ENTRY_POINT = ModelKind(
    fit=fit,
    score=score,
    checks={
        "n_rounds": positive_int,
        "shrinkage": positive,
        "max_depth": positive_int,
        "subsample": fraction,
        "min_samples_leaf": positive_int,
    },
)
