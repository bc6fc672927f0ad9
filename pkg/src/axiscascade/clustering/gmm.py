"""
Gaussian mixture with diagonal covariances, fitted by EM.

Seeded from a k-means run with the same generator. Variances are floored at
``var_floor``, which keeps every M-step a constrained maximizer. Iteration
stops when the mean per-point log-likelihood changes by less than ``tol``,
that is when ``|ll_new - ll_old| / n < tol`` for the total log-likelihood
``ll`` over ``n`` points.
"""

import numpy as np
from scipy.special import logsumexp

from axiscascade.clustering.api import ClusterMethod, ClusterResult
from axiscascade.clustering.kmeans import kmeans_plus_plus, lloyd

_LOG_2PI = np.log(2.0 * np.pi)
_MIN_MASS = 1e-10


def log_gaussian_diag(X: np.ndarray, means: np.ndarray, variances: np.ndarray):
    """``(n, k)`` log densities of every point under every component."""
    out = np.empty((X.shape[0], means.shape[0]))
    for j in range(means.shape[0]):
        diff = X - means[j]
        out[:, j] = -0.5 * (
            np.sum(_LOG_2PI + np.log(variances[j]))
            + np.sum(diff * diff / variances[j], axis=1)
        )
    return out


def e_step(X, weights, means, variances):
    """Returns ``(log_resp, total_log_likelihood)``."""
    weighted = log_gaussian_diag(X, means, variances) + np.log(weights)
    norm = logsumexp(weighted, axis=1)
    return weighted - norm[:, None], float(norm.sum())


def m_step(X, resp, means, variances, var_floor):
    mass = resp.sum(axis=0)
    weights = np.maximum(mass, _MIN_MASS) / X.shape[0]
    weights = weights / weights.sum()
    new_means = means.copy()
    new_vars = variances.copy()
    for j in range(means.shape[0]):
        if mass[j] < _MIN_MASS:
            continue
        mu = resp[:, j] @ X / mass[j]
        diff = X - mu
        new_means[j] = mu
        new_vars[j] = np.maximum(resp[:, j] @ (diff * diff) / mass[j], var_floor)
    return weights, new_means, new_vars


def fit_gmm_diag(
    X: np.ndarray, method: ClusterMethod, rng: np.random.Generator
) -> ClusterResult:
    n, d = X.shape
    k = method.k
    init = lloyd(X, kmeans_plus_plus(X, k, rng), method.max_iter, method.tol)
    means = init.centers.copy()
    variances = np.empty((k, d))
    weights = np.empty(k)
    overall_var = np.maximum(X.var(axis=0), method.var_floor)
    for j in range(k):
        members = X[init.assignment == j]
        weights[j] = max(len(members), 1) / n
        if len(members) > 1:
            variances[j] = np.maximum(members.var(axis=0), method.var_floor)
        else:
            variances[j] = overall_var
    weights /= weights.sum()

    history = []
    converged = False
    log_resp, ll = e_step(X, weights, means, variances)
    history.append(ll)
    for _ in range(method.max_iter):
        weights, means, variances = m_step(
            X, np.exp(log_resp), means, variances, method.var_floor
        )
        log_resp, ll = e_step(X, weights, means, variances)
        history.append(ll)
        if abs(history[-1] - history[-2]) / n < method.tol:
            converged = True
            break
    return ClusterResult(
        assignment=np.argmax(log_resp, axis=1),
        centers=means,
        iterations=len(history) - 1,
        objective=history[-1],
        history=tuple(history),
        converged=converged,
    )
