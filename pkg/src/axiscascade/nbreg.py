"""
Negative binomial (NB2) count regression with Wald inference.

The model has a log link, ``mu = exp(X @ beta)``, and variance
``mu + alpha * mu**2``. Fitting alternates two steps, each of which can only
raise the log-likelihood:

- ``beta`` by iteratively reweighted least squares at fixed ``alpha``, with
  step halving whenever a full step would lower the likelihood;
- ``alpha`` by a bounded Brent search over ``log(alpha)`` in
  ``[log(1e-6), log(1e3)]`` at fixed ``beta``.

Standard errors come from the inverse observed information over
``(beta, alpha)`` at the optimum, so the ``beta`` errors carry the
uncertainty in ``alpha``. When ``alpha`` sits on a bound the information
is taken over ``beta`` alone and ``alpha_se`` is ``nan``.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.special import gammaln
from scipy.stats import norm

from axiscascade.core.errors import SingularDesignError, ValidationError

__all__ = [
    "ALPHA_BOUNDS",
    "DesignMatrix",
    "RegressionResult",
    "fit_nb2",
    "nb2_loglik",
    "observed_information",
    "significance_stars",
]

_logger = logging.getLogger(__name__)

ALPHA_BOUNDS = (1e-6, 1e3)
INTERCEPT = "intercept"
_MAX_CONDITION = 1e12
_MAX_HALVINGS = 30
# below this a likelihood drop is rounding noise
_TINY_STEP = 1e-6


@dataclass(frozen=True)
class DesignMatrix:
    """
    Covariate columns (the intercept is an ordinary, named column) and a
    count response.
    """

    columns: Tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    response: str = "y"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or X.shape[1] != len(self.columns):
            raise ValidationError(
                f"Design shape does not match its column names:\n"
                f"    shape:   {X.shape}\n"
                f"    columns: {self.columns}"
            )
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError(f"Duplicate design columns: {self.columns}")
        if y.ndim != 1 or len(y) != len(X):
            raise ValidationError("the response needs one value per design row")
        if not np.isfinite(X).all():
            raise ValidationError("design matrix contains non-finite values")
        if not np.isfinite(y).all() or (y < 0).any() or (y != np.round(y)).any():
            raise ValidationError("the response must be finite non-negative integers")
        n, p = X.shape
        if n <= p:
            raise ValidationError(f"need more rows than columns, got {n} x {p}")
        rank = np.linalg.matrix_rank(X)
        if rank < p:
            raise SingularDesignError(
                f"Design matrix is rank deficient:\n"
                f"    rank:    {rank}\n"
                f"    columns: {p} {self.columns}"
            )

    @classmethod
    def from_frame(
        cls,
        frame: pd.DataFrame,
        response: str,
        columns: Optional[Sequence[str]] = None,
        add_intercept: bool = True,
    ) -> "DesignMatrix":
        """
        Takes ``columns`` (default: every column but the response) from
        ``frame`` and appends an ``intercept`` column of ones.
        """
        if response not in frame.columns:
            raise ValidationError(f"response column {response!r} not in table")
        if columns is None:
            columns = [c for c in frame.columns if c not in (response, INTERCEPT)]
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise ValidationError(f"columns missing from table: {missing}")
        try:
            X = frame[list(columns)].to_numpy(dtype=float)
            y = frame[response].to_numpy(dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"non-numeric regression input: {exc}") from exc
        names = list(columns)
        if add_intercept:
            X = np.hstack([X, np.ones((len(X), 1))])
            names.append(INTERCEPT)
        return cls(tuple(names), X, y, response)

    @classmethod
    def from_csv(
        cls,
        path: Union[str, Path],
        response: str,
        columns: Optional[Sequence[str]] = None,
    ) -> "DesignMatrix":
        return cls.from_frame(pd.read_csv(path), response, columns)


def nb2_loglik(y: np.ndarray, mu: np.ndarray, alpha: float) -> float:
    """
    NB2 log-likelihood.

    Near zero ``alpha`` it approaches the Poisson log-likelihood:

    >>> from scipy.stats import poisson
    >>> y, mu = np.array([0.0, 1.0, 3.0]), np.full(3, 1.5)
    >>> bool(abs(nb2_loglik(y, mu, 1e-6) - poisson.logpmf(y, mu).sum()) < 1e-3)
    True
    """
    r = 1.0 / alpha
    return float(
        np.sum(
            gammaln(y + r)
            - gammaln(r)
            - gammaln(y + 1.0)
            + r * np.log(r / (r + mu))
            + y * np.log(mu / (r + mu))
        )
    )


def significance_stars(p: float) -> str:
    """
    >>> [significance_stars(p) for p in (0.001, 0.03, 0.08, 0.5)]
    ['***', '**', '*', '']
    """
    if p <= 0.01:
        return "***"
    if p <= 0.05:
        return "**"
    if p <= 0.1:
        return "*"
    return ""


@dataclass(frozen=True)
class RegressionResult:
    columns: Tuple[str, ...]
    coef: np.ndarray
    std_err: np.ndarray
    z: np.ndarray
    p: np.ndarray
    alpha: float
    alpha_se: float
    loglik: float
    iterations: int
    converged: bool
    loglik_history: List[float] = field(default_factory=list, repr=False)

    def to_frame(self) -> pd.DataFrame:
        """One row per variable: ``coef, std_err, z, p, stars``."""
        frame = pd.DataFrame(
            {
                "variable": list(self.columns),
                "coef": self.coef,
                "std_err": self.std_err,
                "z": self.z,
                "p": self.p,
                "stars": [significance_stars(p) for p in self.p],
            }
        )
        return frame

    def format_table(self) -> str:
        lines = [f"{'variable':<24}{'coef':>12}{'std err':>12}{'p':>10}"]
        for row in self.to_frame().itertuples(index=False):
            lines.append(
                f"{row.variable:<24}{row.coef:>12.4f}{row.std_err:>12.4f}"
                f"{row.p:>10.3f} {row.stars}"
            )
        lines.append(f"{'alpha':<24}{self.alpha:>12.4f}{self.alpha_se:>12.4f}")
        lines.append(f"log-likelihood {self.loglik:.4f}, {self.iterations} iterations")
        lines.append("*: p <= 0.1, **: p <= 0.05, ***: p <= 0.01")
        return "\n".join(lines)

    def save_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = self.to_frame()
        extra = pd.DataFrame(
            [
                {"variable": "alpha", "coef": self.alpha, "std_err": self.alpha_se},
                {"variable": "loglik", "coef": self.loglik},
            ]
        )
        pd.concat([frame, extra], ignore_index=True).to_csv(
            path, index=False, float_format="%.10g", lineterminator="\n"
        )
        return path


def _mu(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return np.exp(np.clip(X @ beta, -700.0, 700.0))


def _irls(
    X: np.ndarray,
    y: np.ndarray,
    beta: np.ndarray,
    alpha: float,
    max_iter: int,
    tol: float,
) -> np.ndarray:
    """Maximizes the likelihood over ``beta`` at fixed ``alpha``."""
    ll = nb2_loglik(y, _mu(X, beta), alpha)
    for _ in range(max_iter):
        eta = X @ beta
        mu = _mu(X, beta)
        w = mu / (1.0 + alpha * mu)
        z = eta + (y - mu) / mu
        xtw = X.T * w
        info = xtw @ X
        if np.linalg.cond(info) > _MAX_CONDITION:
            raise SingularDesignError(
                f"IRLS weighted design is ill-conditioned:\n"
                f"    condition number: {np.linalg.cond(info):.3g}"
            )
        proposal = np.linalg.solve(info, xtw @ z)
        step = proposal - beta
        for _ in range(_MAX_HALVINGS):
            candidate = beta + step
            ll_new = nb2_loglik(y, _mu(X, candidate), alpha)
            if ll_new >= ll or np.max(np.abs(step)) < _TINY_STEP:
                break
            step = step / 2.0
        else:
            return beta
        beta, ll = candidate, ll_new
        if np.max(np.abs(step)) < tol:
            break
    return beta


def _best_alpha(y: np.ndarray, mu: np.ndarray, alpha: float) -> float:
    lo, hi = np.log(ALPHA_BOUNDS[0]), np.log(ALPHA_BOUNDS[1])
    res = minimize_scalar(
        lambda log_a: -nb2_loglik(y, mu, float(np.exp(log_a))),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    found = float(np.exp(res.x))
    current = nb2_loglik(y, mu, alpha)
    # a move must beat rounding noise, or alpha never settles
    if nb2_loglik(y, mu, found) > current + 1e-12 * max(1.0, abs(current)):
        return found
    return alpha


def _beta_information(X, y, mu, alpha) -> np.ndarray:
    d = mu * (1.0 + alpha * y) / (1.0 + alpha * mu) ** 2
    return (X.T * d) @ X


def _alpha_curvature(y, mu, alpha) -> float:
    """Second derivative of the log-likelihood in ``alpha``."""
    log_a = np.log(alpha)
    h = 1e-4

    def ll(la):
        return nb2_loglik(y, mu, float(np.exp(la)))

    # taken in log(alpha), mapped back by the chain rule
    d1 = (ll(log_a + h) - ll(log_a - h)) / (2.0 * h)
    d2 = (ll(log_a + h) - 2.0 * ll(log_a) + ll(log_a - h)) / h**2
    return (d2 - d1) / alpha**2


def observed_information(X, y, mu, alpha) -> np.ndarray:
    """
    Observed information over ``(beta, alpha)``, with ``alpha`` as the last
    row and column. The beta block and the beta-alpha cross terms are
    analytic; the alpha entry is a numerical second derivative.
    """
    k = X.shape[1]
    info = np.empty((k + 1, k + 1))
    info[:k, :k] = _beta_information(X, y, mu, alpha)
    cross = X.T @ (mu * (y - mu) / (1.0 + alpha * mu) ** 2)
    info[:k, k] = cross
    info[k, :k] = cross
    info[k, k] = -_alpha_curvature(y, mu, alpha)
    return info


def _on_alpha_bound(alpha: float) -> bool:
    return alpha <= 10 * ALPHA_BOUNDS[0] or alpha >= ALPHA_BOUNDS[1] / 10


def _wald_std_errors(X, y, mu, alpha) -> Tuple[np.ndarray, float]:
    info_beta = _beta_information(X, y, mu, alpha)
    if np.linalg.cond(info_beta) > _MAX_CONDITION:
        raise SingularDesignError("observed information is singular at the optimum")
    k = X.shape[1]
    info = observed_information(X, y, mu, alpha)
    if not _on_alpha_bound(alpha) and np.all(np.linalg.eigvalsh(info) > 0):
        cov = np.linalg.inv(info)
        return np.sqrt(np.diag(cov)[:k]), float(np.sqrt(cov[k, k]))
    # alpha at a bound or the likelihood flat in it: beta alone, no alpha error
    _logger.info("NB2: alpha=%.4g has no Wald error; beta errors ignore it", alpha)
    return np.sqrt(np.diag(np.linalg.inv(info_beta))), float("nan")


def fit_nb2(
    d: DesignMatrix, max_iter: int = 100, tol: float = 1e-8
) -> RegressionResult:
    """
    Fits NB2 by alternating IRLS for ``beta`` and a bounded search for
    ``alpha``. Converged when ``max |d beta| < tol`` and
    ``|d alpha| / alpha < tol``; otherwise the last iterate is returned with
    ``converged=False``.

    :raises SingularDesignError: the weighted design is ill-conditioned.
    """
    X, y = d.X, d.y
    beta = np.zeros(X.shape[1])
    if INTERCEPT in d.columns:
        beta[d.columns.index(INTERCEPT)] = np.log(max(y.mean(), 1e-8))
    alpha = 1.0
    ll = nb2_loglik(y, _mu(X, beta), alpha)
    history = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_beta = _irls(X, y, beta, alpha, max_iter, tol)
        new_alpha = _best_alpha(y, _mu(X, new_beta), alpha)
        ll = nb2_loglik(y, _mu(X, new_beta), new_alpha)
        history.append(ll)
        d_beta = np.max(np.abs(new_beta - beta))
        d_alpha = abs(new_alpha - alpha) / alpha
        beta, alpha = new_beta, new_alpha
        if d_beta < tol and d_alpha < tol:
            converged = True
            break
    if not converged:
        _logger.warning("NB2 did not converge in %d iterations", max_iter)
    # final beta polish at the chosen alpha
    beta = _irls(X, y, beta, alpha, max_iter, tol)
    mu = _mu(X, beta)
    std_err, alpha_se = _wald_std_errors(X, y, mu, alpha)
    z = beta / std_err
    p = 2.0 * norm.sf(np.abs(z))
    ll = nb2_loglik(y, mu, alpha)
    _logger.info("NB2: alpha=%.4g loglik=%.4f in %d iterations", alpha, ll, iterations)
    return RegressionResult(
        columns=d.columns,
        coef=beta,
        std_err=std_err,
        z=z,
        p=p,
        alpha=alpha,
        alpha_se=alpha_se,
        loglik=ll,
        iterations=iterations,
        converged=converged,
        loglik_history=history,
    )
