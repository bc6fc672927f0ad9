"""
End-to-end runs, grid searches, ablation, uncertainty sampling and corpus
scoring on a tiny text corpus.
"""

import json

import numpy as np
import pandas as pd
import pytest

from axiscascade.cascade import Cascade, load_predictor
from axiscascade.core.errors import (
    ConfigError,
    StageError,
    UnscorableRecordError,
    ValidationError,
)
from axiscascade.data.dataset import Dataset, Document
from axiscascade.embed.words import load_word_vectors
from axiscascade.harness import (
    GridSpec,
    RunConfig,
    ablate,
    grid,
    load_grid_spec,
    load_run_config,
    prepare,
    run,
    score_corpus,
    select_uncertain,
)
from axiscascade.harness.pipeline import embed_dataset
from axiscascade.harness.reports import PARTITION_COLUMNS
from axiscascade.text.prep import EMPTY_RESOURCES, PrepLevel

from _fixtures import (
    RUN_CONFIG,
    overlap_corpus,
    text_corpus,
    write_jsonl,
    write_workspace,
)


def write_config(path, **changes):
    path.write_text(json.dumps(dict(RUN_CONFIG, **changes)), encoding="utf-8")
    return path


@pytest.fixture
def workspace(tmp_path):
    return write_workspace(tmp_path)


def embedded_pool(workspace, copies=1):
    pool = Dataset(doc.replace(label=None) for doc in text_corpus(copies))
    we = load_word_vectors(workspace / "words.vec")
    return embed_dataset(pool, we, PrepLevel.L3, EMPTY_RESOURCES)


def test_run_writes_every_output(workspace):
    result = run(load_run_config(workspace / "run.json"))
    out = workspace / "out"
    assert set(result.paths) == {
        "report",
        "provenance",
        "bundle",
        "table3",
        "partition",
    }
    assert all(path.parent == out for path in result.paths.values())
    assert result.report.f1_macro >= 0.8
    table3 = pd.read_csv(out / "table3.csv")
    assert tuple(table3.columns) == PARTITION_COLUMNS
    assert table3["method"].tolist() == ["axis(t=0)"]
    assert table3["label_2"].iloc[0] >= 1
    assert table3["total"].iloc[0] == result.report.provenance["train_size"] == 52
    assert len(pd.read_csv(out / "partition.csv")) == 52
    provenance = json.loads((out / "provenance.json").read_text())
    assert provenance["config"]["method"] == {"axis": {"t": 0}}
    assert set(provenance["inputs"]) == {"dataset", "word_vectors"}
    assert isinstance(load_predictor(out / "model.bundle"), Cascade)


def test_repeated_runs_are_byte_identical(workspace):
    cfg = load_run_config(workspace / "run.json")
    names = ("report.json", "provenance.json", "table3.csv", "partition.csv")
    run(cfg)
    first = {name: (workspace / "out" / name).read_bytes() for name in names}
    run(cfg)
    assert first == {name: (workspace / "out" / name).read_bytes() for name in names}


def test_single_stage_run(workspace):
    cfg = load_run_config(write_config(workspace / "single.json", mode="single"))
    result = run(cfg)
    assert result.partition is None
    assert set(result.paths) == {"report", "provenance", "bundle"}
    assert result.report.provenance["method"] is None


def test_prepare_skips_records_without_known_words(workspace):
    extra = Document("x", text="@nobody http://t.co/y", label=1)
    ds = Dataset(list(overlap_corpus()) + [extra])
    write_jsonl(workspace / "corpus.jsonl", ds)
    prepared = prepare(load_run_config(workspace / "run.json"))
    skipped = prepared.skipped["train"] + prepared.skipped["test"]
    assert skipped == ["x"]
    assert len(prepared.train) + len(prepared.test) == 65


def test_failures_name_their_stage(workspace):
    (workspace / "corpus.jsonl").write_text("{not json\n", encoding="utf-8")
    with pytest.raises(StageError) as info:
        run(load_run_config(workspace / "run.json"))
    assert info.value.stage == "load"
    assert info.value.is_validation


def test_degenerate_partition_fails_in_training(workspace):
    cfg = load_run_config(write_config(workspace / "r.json", method={"axis": {"t": 5}}))
    with pytest.raises(StageError) as info:
        run(cfg)
    assert info.value.stage == "train"
    assert not info.value.is_validation


GRID = {
    "thresholds": [0, 5],
    "cluster_methods": [{"name": "kmeans", "k": 2}],
    "stage_a_kinds": ["lr"],
    "stage_b_kinds": ["lr", "gnb"],
    "hyperparams": {"l2": 0.01},
}


def test_grid(workspace):
    cfg = load_run_config(workspace / "run.json")
    rows = grid(cfg, GridSpec.from_dict(GRID))
    assert len(rows) == 3 * 2 + 2
    assert [row["rank"] for row in rows] == list(range(1, 9))
    assert rows[0]["best"] and not any(row["best"] for row in rows[1:])
    failed = [row for row in rows if row["status"] == "error"]
    assert {row["method"] for row in failed} >= {"axis(t=5)"}
    assert all(
        "degenerate second stage" in row["message"]
        for row in failed
        if row["method"] == "axis(t=5)"
    )
    assert rows[-1]["status"] == "error"
    ok = [row["f1_macro"] for row in rows if row["status"] == "ok"]
    assert ok == sorted(ok, reverse=True)
    singles = [row for row in rows if row["mode"] == "single"]
    assert sorted(row["stage_a"] for row in singles) == ["gnb()", "lr(l2=0.01)"]
    table = pd.read_csv(workspace / "out" / "table4.csv")
    assert table["cell"].tolist() == [row["cell"] for row in rows]


def test_grid_is_the_same_on_threads(workspace):
    cfg = load_run_config(workspace / "run.json")
    serial = grid(cfg, GridSpec.from_dict(GRID))
    threaded = grid(
        cfg, GridSpec.from_dict(dict(GRID, executor="thread", max_workers=2))
    )
    assert threaded == serial


def test_grid_spec_file(workspace):
    (workspace / "grid.json").write_text(json.dumps(GRID), encoding="utf-8")
    gs = load_grid_spec(workspace / "grid.json")
    assert [m.tag for m in gs.methods][:2] == ["axis(t=0)", "axis(t=5)"]
    assert gs.single_kinds == ("gnb", "lr")


def test_ablation(workspace):
    cfg = load_run_config(workspace / "run.json")
    rows = ablate(cfg)
    assert [row["features"] for row in rows] == [
        "embedding",
        "text",
        "text+metatext",
        "text+metatext+user",
        "text+metatext+user+time",
    ]
    assert [row["status"] for row in rows] == ["ok"] * 5
    table = pd.read_csv(workspace / "out" / "ablation.csv")
    assert table["step"].tolist() == [0, 1, 2, 3, 4]


def test_select_uncertain(workspace):
    run(load_run_config(workspace / "run.json"))
    predictor = load_predictor(workspace / "out" / "model.bundle")
    pool = embedded_pool(workspace)
    chosen = select_uncertain(predictor, pool, 4)
    distance = dict(zip(pool.ids, np.abs(predictor.score_records(pool) - 0.5)))
    ranked = sorted(pool.ids, key=lambda doc_id: (distance[doc_id], doc_id))
    assert chosen == ranked[:4]
    assert select_uncertain(predictor, pool, 0) == []
    with pytest.raises(ValidationError):
        select_uncertain(predictor, pool, len(pool) + 1)
    bare = Dataset([Document("bare", text="nothing known")])
    with pytest.raises(UnscorableRecordError):
        select_uncertain(predictor, bare, 1)


def test_score_corpus(workspace):
    run(load_run_config(workspace / "run.json"))
    predictor = load_predictor(workspace / "out" / "model.bundle")
    pool = embedded_pool(workspace, copies=2)
    summary = score_corpus(predictor, pool, workspace / "scored" / "pool.csv")
    assert summary["total"] == 24
    assert summary["label_0"] + summary["label_1"] == 24
    frame = pd.read_csv(workspace / "scored" / "pool.csv")
    assert frame.columns.tolist() == [
        "id",
        "predicted_label",
        "score",
        "stage_a_score",
        "stage_b_score",
    ]
    assert summary["routed_to_stage_b"] == int(frame["stage_b_score"].notna().sum())
    assert ((frame["score"] >= 0.5) == (frame["predicted_label"] == 1)).all()
    written = json.loads((workspace / "scored" / "pool.csv.summary.json").read_text())
    assert written == summary


def test_config_round_trip(workspace):
    cfg = load_run_config(workspace / "run.json")
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.features is None
    assert cfg.dataset == (workspace / "corpus.jsonl").resolve()


@pytest.mark.parametrize(
    "changes,message",
    (
        ({"colour": "red"}, "Unknown keys"),
        ({"dataset": "missing.jsonl"}, "does not exist"),
        ({"stage_b": None}, "needs a 'stage_b'"),
        ({"method": {"axis": {"t": 0}, "cluster": {"name": "kmeans"}}}, "exactly one"),
        ({"method": {"cluster": {"name": "spectral"}}}, "method.cluster"),
        ({"stage_a": {"kind": "lr", "hyperparams": {"k": 3}}}, "stage_a"),
        ({"split": {"ratio": 0}}, "split ratio"),
        ({"split": {"ratio": 1.0}}, "test records to evaluate"),
        ({"features": {"enabled": False}, "use_embedding": False}, "enable"),
        ({"prep_level": "L9"}, "prep_level"),
    ),
)
def test_bad_run_configs(workspace, changes, message):
    path = write_config(workspace / "bad.json", **changes)
    with pytest.raises(ConfigError, match=message):
        load_run_config(path)


def test_unreadable_configs(workspace):
    with pytest.raises(ConfigError, match="cannot read"):
        load_run_config(workspace / "missing.json")
    (workspace / "broken.json").write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_run_config(workspace / "broken.json")


@pytest.mark.parametrize(
    "raw",
    (
        {"stage_a_kinds": ["lr"]},
        {"thresholds": [0], "stage_a_kinds": []},
        {"thresholds": [0], "stage_a_kinds": ["warp"]},
        {"thresholds": [0], "hyperparams": {"warp_factor": 9}},
        {"thresholds": [0], "selection_metric": "accuracy"},
        {"thresholds": [0], "executor": "mpi"},
        {"thresholds": [0], "cells": 3},
    ),
)
def test_bad_grid_specs(raw):
    with pytest.raises(ConfigError):
        GridSpec.from_dict(raw)
