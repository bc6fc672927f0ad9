"""
Routing and scoring of the two-stage classifier, and its bundle files.
"""

import numpy as np
import pytest

from axiscascade.cascade import (
    Cascade,
    cascade_score,
    load_predictor,
    predict_cascade,
    save_predictor,
    train_cascade,
    train_single,
)
from axiscascade.core.bundle import dump_bundle
from axiscascade.core.errors import BundleError, DimensionMismatchError
from axiscascade.data.dataset import stratified_split
from axiscascade.models import ModelSpec, predict, train
from axiscascade.resample import ResampleConfig
from axiscascade.splitcraft import (
    ThresholdConfig,
    assign_axis,
    axis_embeddings,
    build_nd2,
)

from _fixtures import separable, small_synth

LR = ModelSpec("lr")


@pytest.fixture(scope="module")
def split():
    return stratified_split(small_synth(seed=3), 0.8, 7)


@pytest.fixture(scope="module")
def cascade(split):
    part = assign_axis(split.train, axis_embeddings(split.train), ThresholdConfig(0))
    return train_cascade(LR, ModelSpec("knn", {"k": 3}), split.train, part)


def test_final_label_needs_both_stages(cascade, split):
    X = cascade.encode(split.test)
    a = cascade.stage_a.predict(X)
    b = cascade.stage_b.predict(X)
    assert np.array_equal(cascade.predict(X), a & b)
    by_record = cascade.predict_records(split.test)
    assert np.array_equal(predict_cascade(cascade, X), by_record)


def test_cascade_only_vetoes_negatives(cascade, split):
    ids = np.array(split.test.ids)
    final = cascade.predict_records(split.test)
    first = cascade.stage_a.predict(cascade.encode(split.test))
    assert set(ids[final == 1]) <= set(ids[first == 1])
    assert np.all(final <= first)


def test_second_stage_label_polarity(split):
    part = assign_axis(split.train, axis_embeddings(split.train), ThresholdConfig(0))
    nd2 = build_nd2(part, split.train)
    X, y = nd2.embedding_matrix(), nd2.labels()
    on_p2 = np.array([doc_id in part.p2 for doc_id in nd2.ids])
    assert on_p2.any() and not y[on_p2].any()
    # A fully grown tree reproduces its training labels, so inverting the
    # ND2 labels shows up directly on the label-2 records.
    right = train(ModelSpec("dtree"), X, y)
    inverted = train(ModelSpec("dtree"), X, 1 - y)
    assert np.mean(predict(right, X[on_p2]) == 0) > 0.5
    assert np.mean(predict(inverted, X[on_p2]) == 0) < 0.5


def test_score_agrees_with_the_label(cascade, split):
    X = cascade.encode(split.test)
    score = cascade_score(cascade, X)
    assert np.array_equal(score >= 0.5, cascade.predict(X) == 1)
    score_a, score_b = cascade.stage_scores(X)
    routed = score_a >= 0.5
    assert np.isnan(score_b).tolist() == (~routed).tolist()
    assert np.array_equal(score[~routed], score_a[~routed])
    assert np.array_equal(score[routed], score_b[routed])


def test_provenance(cascade, split):
    prov = cascade.provenance
    assert prov["method"] == "axis(t=0)"
    assert prov["partition"]["total"] == len(split.train)
    assert prov["stage_b"] == {"kind": "knn", "hyperparams": {"k": 3}, "seed": 0}
    assert prov["feature_names"] == [f"emb_{i}" for i in range(4)]


def test_hand_built_routing():
    X, y = separable(200, seed=0)
    # Stage A calls the right half-plane 1; stage B overturns x1 < 0 back to 0.
    stage_a = train(LR, X, y)
    stage_b = train(LR, X, (X[:, 1] > 0).astype(int))
    c = Cascade(stage_a, stage_b, {"method": "hand"})
    points = np.array([[-3.0, -3.0], [3.0, 3.0], [6.0, -2.0]])
    assert c.predict(points).tolist() == [0, 1, 0]
    with pytest.raises(DimensionMismatchError):
        c.predict(np.zeros((2, 3)))


def test_stages_must_share_a_dimension():
    X, y = separable(50)
    X3, y3 = separable(50, dim=3)
    with pytest.raises(DimensionMismatchError):
        Cascade(train(LR, X, y), train(LR, X3, y3), {"method": "hand"})


def test_save_and_load(cascade, split, tmp_path):
    path = save_predictor(tmp_path / "c.bundle", cascade)
    loaded = load_predictor(path)
    assert isinstance(loaded, Cascade)
    assert np.array_equal(
        loaded.score_records(split.test), cascade.score_records(split.test)
    )
    assert loaded.provenance == cascade.provenance


def test_single_stage(split, tmp_path):
    single = train_single(LR, split.train, ResampleConfig("smote", apply_to="single"))
    assert single.provenance["method"] == "single"
    assert single.provenance["resample"]["strategy"] == "smote"
    X = single.encode(split.test)
    assert np.array_equal(single.predict(X), (single.score(X) >= 0.5).astype(int))
    loaded = load_predictor(save_predictor(tmp_path / "s.bundle", single))
    assert np.array_equal(loaded.predict(X), single.predict(X))


def test_bundle_errors(tmp_path):
    with pytest.raises(BundleError, match="cannot read"):
        load_predictor(tmp_path / "missing.bundle")
    junk = tmp_path / "junk.bundle"
    junk.write_bytes(b"not a pickle")
    with pytest.raises(BundleError):
        load_predictor(junk)
    other = dump_bundle(tmp_path / "other.bundle", "dataset", [1, 2, 3])
    with pytest.raises(BundleError, match="not a predictor"):
        load_predictor(other)
