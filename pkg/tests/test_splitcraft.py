"""
Training-set relabeling: the axis rule, the clustering rule, and the two
derived training sets.
"""

import itertools

import pandas as pd
import pytest

from axiscascade.clustering import ClusterMethod
from axiscascade.core.errors import (
    DegenerateClusteringError,
    DegenerateStageError,
    ValidationError,
)
from axiscascade.data.dataset import Dataset, Document, stratified_split
from axiscascade.data.synth import acceptance_spec, synth_generate
from axiscascade.splitcraft import (
    ThresholdConfig,
    TrainPartition,
    assign_axis,
    assign_cluster,
    axis_embeddings,
    axis_margins,
    build_nd1,
    build_nd2,
    export_partition,
    partition_from_assignment,
)

from _fixtures import small_synth


@pytest.fixture(scope="module")
def acceptance_train():
    return stratified_split(synth_generate(acceptance_spec(), 0), 0.85, 13).train


@pytest.mark.parametrize(
    "method",
    (
        ThresholdConfig(0.0),
        ThresholdConfig(0.03),
        ThresholdConfig(0.05),
        ClusterMethod("kmeans", k=2),
        ClusterMethod("gmm_diag", k=2),
        ClusterMethod("birch", k=2, threshold=1.5),
    ),
    ids=lambda m: m.tag,
)
def test_partition_covers_the_training_split(acceptance_train, method):
    if isinstance(method, ThresholdConfig):
        part = assign_axis(acceptance_train, axis_embeddings(acceptance_train), method)
    else:
        part = assign_cluster(acceptance_train, method, seed=13)
    counts = part.counts()
    assert counts["label_0"] + counts["label_1"] + counts["label_2"] == 4335
    assert counts["total"] == 4335
    assert counts["label_1"] == 1230
    assert part.n == {d.id for d in acceptance_train if d.label == 1}


@pytest.mark.parametrize("seed", range(20))
def test_label2_shrinks_as_threshold_grows(seed):
    train = small_synth(seed=seed)
    axes = axis_embeddings(train)
    p2 = [assign_axis(train, axes, ThresholdConfig(t)).p2 for t in (0.0, 0.03, 0.05)]
    assert p2[2] <= p2[1] <= p2[0]


def test_axis_rule_matches_margins():
    train = small_synth(seed=4)
    axes = axis_embeddings(train)
    margins = dict(zip(train.ids, axis_margins(train, axes)))
    part = assign_axis(train, axes, ThresholdConfig(0.1))
    for doc in train:
        if doc.label == 0:
            assert (doc.id in part.p2) == (margins[doc.id] > 0.1)


@pytest.mark.parametrize("t", (0.0, 0.03))
def test_axis_rule_ignores_embedding_scale(t):
    train = small_synth(seed=5)
    scaled = Dataset(doc.replace(embedding=doc.embedding * 3.7) for doc in train)
    part = assign_axis(train, axis_embeddings(train), ThresholdConfig(t))
    rescaled = assign_axis(scaled, axis_embeddings(scaled), ThresholdConfig(t))
    assert (rescaled.p0, rescaled.p2, rescaled.n) == (part.p0, part.p2, part.n)


def test_zero_margin_goes_to_p0():
    train = Dataset(
        [
            Document("n", label=1, embedding=[1.0, 0.0]),
            Document("a", label=0, embedding=[0.0, 1.0]),
            Document("b", label=0, embedding=[2.0, -1.0]),
        ]
    )
    axes = axis_embeddings(train)
    assert axes.emb0.tolist() == axes.emb1.tolist()
    part = assign_axis(train, axes, ThresholdConfig(0.0))
    assert part.p0 == {"a", "b"} and not part.p2
    with pytest.raises(DegenerateStageError):
        build_nd2(part, train)


def test_axis_embeddings_need_both_classes():
    train = Dataset([Document("a", label=0, embedding=[1.0])])
    with pytest.raises(ValidationError):
        axis_embeddings(train)


LABELS = [1, 1, 0, 0, 0, 1, 0]


def _train():
    return Dataset(
        Document(f"r{i}", label=label, embedding=[float(i)])
        for i, label in enumerate(LABELS)
    )


def test_clustering_rule():
    part = partition_from_assignment(_train(), [0, 0, 0, 1, 1, 1, -1], "test")
    assert part.n == {"r0", "r1", "r5"}
    assert part.p2 == {"r2"}
    assert part.p0 == {"r3", "r4", "r6"}


def test_clustering_rule_tie_goes_to_lowest_label():
    part = partition_from_assignment(_train(), [3, 1, 3, 1, 3, -1, 1], "test")
    assert part.p2 == {"r3", "r6"}


@pytest.mark.parametrize("names", list(itertools.permutations((0, 7, 42))))
def test_clustering_rule_ignores_cluster_names(names):
    # Negatives per cluster: 2, 0 and 1, so the negative cluster is unique.
    base = [0, 0, 0, 1, 2, 2, -1]
    part = partition_from_assignment(_train(), base, "test")
    renamed = [-1 if c < 0 else names[c] for c in base]
    other = partition_from_assignment(_train(), renamed, "test")
    assert (other.p0, other.p2, other.n) == (part.p0, part.p2, part.n)
    assert part.p2 == {"r2"}


@pytest.mark.parametrize(
    "assignment",
    ([2, 2, 2, 2, 2, 2, 2], [-1, -1, 0, 0, 1, -1, 1]),
)
def test_degenerate_clusterings(assignment):
    with pytest.raises(DegenerateClusteringError):
        partition_from_assignment(_train(), assignment, "test")


def test_derived_training_sets(tmp_path):
    train = _train()
    part = partition_from_assignment(train, [0, 0, 0, 1, 1, 1, -1], "test")
    nd1 = build_nd1(part, train)
    assert dict(zip(nd1.ids, nd1.labels())) == {
        "r0": 1, "r1": 1, "r2": 1, "r3": 0, "r4": 0, "r5": 1, "r6": 0,
    }
    nd2 = build_nd2(part, train)
    assert dict(zip(nd2.ids, nd2.labels())) == {"r0": 1, "r1": 1, "r2": 0, "r5": 1}
    frame = pd.read_csv(export_partition(part, train, tmp_path / "p.csv"))
    assert list(frame.columns) == ["id", "gold_label", "partition"]
    assert frame["partition"].tolist() == ["n", "n", "p2", "p0", "p0", "n", "p0"]


def test_partition_must_match_training_records():
    part = TrainPartition(p0={"r3"}, p2=set(), n={"r0"}, method_tag="x")
    with pytest.raises(ValidationError):
        build_nd1(part, _train())
    with pytest.raises(ValidationError):
        TrainPartition(p0={"a"}, p2={"a"}, n=set(), method_tag="x")
