"""
PCA and the scatter exports.
"""

import numpy as np
import pandas as pd
import pytest

from axiscascade.core.errors import DimensionMismatchError, ValidationError
from axiscascade.reduce import (
    export_scatter_csv,
    pca_fit,
    pca_inverse_transform,
    pca_transform,
    render_scatter_svg,
    scatter_frame,
)


@pytest.fixture
def cloud():
    rng = np.random.default_rng(0)
    return rng.normal(size=(300, 6)) @ rng.normal(size=(6, 6)) + 3.0


def test_components_are_orthonormal(cloud):
    m = pca_fit(cloud, 4)
    assert np.allclose(m.components @ m.components.T, np.eye(4), atol=1e-8)


def test_matches_a_dense_eigendecomposition(cloud):
    m = pca_fit(cloud, 3)
    eigvals, eigvecs = np.linalg.eigh(np.cov(cloud, rowvar=False))
    top = np.argsort(eigvals)[::-1][:3]
    assert np.allclose(m.explained_variance, eigvals[top], rtol=1e-10)
    for component, vector in zip(m.components, eigvecs[:, top].T):
        assert abs(np.dot(component, vector)) == pytest.approx(1.0, abs=1e-8)
    assert m.total_variance == pytest.approx(eigvals.sum())


def test_projection_variances(cloud):
    m = pca_fit(cloud, 2)
    Z = pca_transform(m, cloud)
    assert np.allclose(Z.mean(axis=0), 0.0, atol=1e-10)
    assert np.allclose(Z.var(axis=0, ddof=1), m.explained_variance)


def test_full_rank_round_trip(cloud):
    m = pca_fit(cloud, 6)
    back = pca_inverse_transform(m, pca_transform(m, cloud))
    assert np.allclose(back, cloud, atol=1e-8)
    assert m.explained_fraction.sum() == pytest.approx(1.0)


def test_collinear_data():
    t = np.linspace(-1.0, 2.0, 20)[:, None]
    m = pca_fit(t * np.array([[1.0, -2.0, 2.0]]) + 5.0, 1)
    assert m.explained_fraction.tolist() == pytest.approx([1.0])
    assert np.allclose(m.components[0], [1 / 3, -2 / 3, 2 / 3])


def test_signs_are_fixed(cloud):
    for row in pca_fit(cloud, 4).components:
        assert row[np.flatnonzero(np.abs(row) > 1e-12)[0]] > 0
    assert np.array_equal(pca_fit(cloud, 4).components, pca_fit(cloud, 4).components)


@pytest.mark.parametrize(
    "X,k",
    (
        (np.zeros(5), 1),
        (np.zeros((1, 3)), 1),
        (np.ones((5, 3)), 1),
        (np.eye(3), 3),
        (np.eye(3), 0),
        (np.array([[0.0, np.inf], [1.0, 2.0], [2.0, 1.0]]), 1),
    ),
)
def test_bad_inputs(X, k):
    with pytest.raises(ValidationError):
        pca_fit(X, k)


def test_transform_checks_the_dimension(cloud):
    with pytest.raises(DimensionMismatchError):
        pca_transform(pca_fit(cloud, 2), np.zeros((3, 5)))


def _frame():
    coords = np.array([[0.0, 1.0], [1.5, -0.5], [2.0, 2.0], [-1.0, 0.25]])
    return scatter_frame(
        ["a", "b", "c", "d"], coords, [0, 1, None, 1], ["p0", "n", "p2", "n"]
    )


def test_scatter_frame():
    frame = _frame()
    assert frame.columns.tolist() == ["id", "pc1", "pc2", "gold_label", "group"]
    assert frame["gold_label"].isna().tolist() == [False, False, True, False]
    with pytest.raises(ValidationError):
        scatter_frame(["a"], np.zeros((1, 1)), [0])


def test_csv_is_byte_stable(tmp_path):
    a = export_scatter_csv(_frame(), tmp_path / "a.csv").read_bytes()
    b = export_scatter_csv(_frame(), tmp_path / "b.csv").read_bytes()
    assert a == b
    assert a.splitlines()[0] == b"id,pc1,pc2,gold_label,group"
    assert pd.read_csv(tmp_path / "a.csv")["group"].tolist() == ["p0", "n", "p2", "n"]


@pytest.mark.parametrize("color_by", ("gold_label", "partition"))
def test_svg_is_byte_stable(tmp_path, color_by):
    a = render_scatter_svg(_frame(), tmp_path / "a.svg", color_by, title="t")
    b = render_scatter_svg(_frame(), tmp_path / "b.svg", color_by, title="t")
    assert a.read_bytes() == b.read_bytes()
    assert b"<svg" in a.read_bytes()
