"""
Principal component analysis down to a few dimensions, and scatter exports
of the projected records (a CSV table and a self-contained SVG).
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from axiscascade.core.errors import DimensionMismatchError, ValidationError

__all__ = [
    "DEFAULT_COLORS",
    "PcaModel",
    "export_scatter_csv",
    "pca_fit",
    "pca_inverse_transform",
    "pca_transform",
    "render_scatter_svg",
    "scatter_frame",
]

_logger = logging.getLogger(__name__)

#: Positive messages purple, negative red; partitions and clusters get their own.
DEFAULT_COLORS = {
    "gold_label": {"0": "purple", "1": "red"},
    "partition": {"p0": "purple", "p2": "orange", "n": "red"},
}

_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class PcaModel:
    """
    :param components: ``k x d`` matrix with orthonormal rows.
    :param explained_variance: the top ``k`` covariance eigenvalues.
    :param explained_fraction: those eigenvalues over the total variance.
    """

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    explained_fraction: np.ndarray
    total_variance: float

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def dim(self) -> int:
        return self.components.shape[1]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flips each row so that its first nonzero coordinate is positive."""
    out = vectors.copy()
    for row in out:
        nonzero = np.flatnonzero(np.abs(row) > _SIGN_TOL)
        if len(nonzero) and row[nonzero[0]] < 0:
            row *= -1.0
    return out


def pca_fit(X, k: int = 2) -> PcaModel:
    """
    Eigendecomposition of the sample covariance of ``X``.

    >>> m = pca_fit(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]), 1)
    >>> np.round(m.components, 6).tolist(), m.explained_fraction.round(6).tolist()
    ([[0.707107, 0.707107]], [1.0])

    :raises ValidationError: fewer than two rows, ``k`` out of
        ``[1, min(n - 1, d)]``, or all rows identical.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"PCA needs a matrix, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise ValidationError(f"PCA needs at least two rows, got {n}")
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= min(n - 1, d):
        raise ValidationError(
            f"Number of components out of range:\n"
            f"    k:       {k!r}\n"
            f"    allowed: 1..{min(n - 1, d)}"
        )
    if not np.isfinite(X).all():
        raise ValidationError("PCA input contains non-finite values")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals, kind="stable")[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    total = float(np.trace(cov))
    if total <= 0.0:
        raise ValidationError("PCA input rows are all identical")
    components = _fix_signs(eigvecs[:, order[:k]].T)
    _logger.debug("PCA: %d components explain %.4f", k, eigvals[:k].sum() / total)
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=eigvals[:k],
        explained_fraction=eigvals[:k] / total,
        total_variance=total,
    )


def pca_transform(m: PcaModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != m.dim:
        raise DimensionMismatchError(
            f"PCA input has the wrong shape:\n"
            f"    fitted dimension: {m.dim}\n"
            f"    got shape:        {X.shape}"
        )
    return (X - m.mean) @ m.components.T


def pca_inverse_transform(m: PcaModel, Z) -> np.ndarray:
    return np.asarray(Z, dtype=float) @ m.components + m.mean


def scatter_frame(
    ids: Sequence[str],
    coords: np.ndarray,
    gold_labels: Sequence[Optional[int]],
    group: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """The ``id, pc1, pc2, gold_label, group`` scatter table."""
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] < 2:
        raise ValidationError("scatter export needs at least two components")
    frame = pd.DataFrame(
        {
            "id": list(ids),
            "pc1": coords[:, 0],
            "pc2": coords[:, 1],
            "gold_label": pd.array(list(gold_labels), dtype="Int64"),
        }
    )
    frame["group"] = list(group) if group is not None else ""
    return frame


def export_scatter_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
    return path


def render_scatter_svg(
    frame: pd.DataFrame,
    path: Union[str, Path],
    color_by: str = "gold_label",
    colors: Optional[Mapping[str, str]] = None,
    title: str = "",
) -> Path:
    """
    Draws ``pc1`` against ``pc2`` coloured by the ``gold_label`` or ``group``
    column. Output is byte-stable across runs.

    :param colors: category to colour; categories it does not name get
        matplotlib's default cycle.
    """
    column = "gold_label" if color_by == "gold_label" else "group"
    if colors is None:
        colors = DEFAULT_COLORS.get(color_by, {})
    categories = frame[column].astype("string").fillna("unlabeled")
    cycle = matplotlib.rcParams["axes.prop_cycle"].by_key()["color"]
    fig = Figure(figsize=(6, 5))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot()
    for i, cat in enumerate(sorted(categories.unique())):
        rows = (categories == cat).to_numpy()
        ax.scatter(
            frame["pc1"].to_numpy()[rows],
            frame["pc2"].to_numpy()[rows],
            s=8,
            alpha=0.7,
            color=colors.get(cat, cycle[i % len(cycle)]),
            label=cat,
        )
    ax.set_xlabel("PC1")
    ax.set_ylabel("PC2")
    if title:
        ax.set_title(title)
    ax.legend(title=color_by, loc="best")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": "axiscascade"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
