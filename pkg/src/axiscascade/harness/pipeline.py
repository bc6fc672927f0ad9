"""
The end-to-end run: load, preprocess, embed, split, partition, train and
evaluate, then write the report, the partition tables, the model bundle and
the provenance record.

Each step runs inside `.pipeline_stage`, which wraps any failure in a
`~axiscascade.core.errors.StageError` naming the step.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from axiscascade import __version__
from axiscascade.cascade import Predictor, save_predictor, train_cascade, train_single
from axiscascade.core.errors import StageError
from axiscascade.core.sys import sha256_file
from axiscascade.data.dataset import Dataset, load_jsonl, stratified_split
from axiscascade.embed.encode import InputEncoder
from axiscascade.embed.words import WordEmbeddings, doc_embedding, load_word_vectors
from axiscascade.harness.config import Method, RunConfig, method_to_dict
from axiscascade.harness.reports import (
    METRIC_COLUMNS,
    PARTITION_COLUMNS,
    write_json,
    write_table,
)
from axiscascade.metrics import EvalReport, evaluate
from axiscascade.models import ModelSpec
from axiscascade.resample import ResampleConfig
from axiscascade.splitcraft import (
    ThresholdConfig,
    TrainPartition,
    assign_axis,
    assign_cluster,
    axis_embeddings,
    export_partition,
)
from axiscascade.text.features import FAMILIES, FeatureConfig
from axiscascade.text.prep import (
    PrepLevel,
    PrepResources,
    is_removable,
    load_resources,
    preprocess,
)

__all__ = [
    "CellResult",
    "Prepared",
    "RunResult",
    "ablate",
    "embed_dataset",
    "fit_and_evaluate",
    "partition_for",
    "pipeline_stage",
    "prepare",
    "run",
]

_logger = logging.getLogger(__name__)


@contextmanager
def pipeline_stage(name: str) -> Iterator[None]:
    """
    >>> with pipeline_stage("split"):
    ...     raise KeyError("x")
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.StageError: pipeline stage 'split' failed: KeyError: 'x'
    """
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        _logger.error("stage %s failed: %s", name, exc)
        raise StageError(name, exc) from exc


def embed_dataset(
    ds: Dataset, we: WordEmbeddings, level: PrepLevel, res: PrepResources
) -> Dataset:
    """
    Replaces every record's embedding by the mean vector of its preprocessed
    tokens; records without a known token end up with none.
    """
    return Dataset(
        doc.replace(embedding=doc_embedding(preprocess(doc.text, level, res), we))
        for doc in ds
    )


def drop_short_documents(
    ds: Dataset, level: PrepLevel, res: PrepResources
) -> Tuple[Dataset, List[str]]:
    dropped = [doc.id for doc in ds if is_removable(doc.text, level, res)]
    if dropped:
        _logger.info("dropped %d documents with too little text", len(dropped))
    return ds.subset(set(ds.ids) - set(dropped)), dropped


@dataclass(frozen=True, eq=False)
class Prepared:
    """
    The data every cell of a run or grid shares: the labeled, embedded
    training split, the test split, and the encoder fitted on the former.
    """

    config: RunConfig
    resources: PrepResources
    train: Dataset
    test: Dataset
    encoder: InputEncoder
    skipped: Dict[str, List[str]] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)


def _input_hashes(cfg: RunConfig) -> Dict[str, str]:
    paths = {"dataset": cfg.dataset}
    if cfg.word_vectors is not None:
        paths["word_vectors"] = cfg.word_vectors
    paths.update({f"resources.{k}": v for k, v in cfg.resources.items()})
    return {name: sha256_file(path) for name, path in sorted(paths.items())}


def prepare(cfg: RunConfig) -> Prepared:
    with pipeline_stage("load"):
        ds = load_jsonl(cfg.dataset)
        inputs = _input_hashes(cfg)
    skipped: Dict[str, List[str]] = {}
    with pipeline_stage("prep"):
        res = load_resources(**cfg.resources)
        if cfg.drop_short_documents:
            ds, skipped["short"] = drop_short_documents(ds, cfg.prep_level, res)
    if cfg.word_vectors is not None:
        with pipeline_stage("embed"):
            we = load_word_vectors(cfg.word_vectors)
            ds = embed_dataset(ds, we, cfg.prep_level, res)
    with pipeline_stage("split"):
        pair = stratified_split(ds, cfg.split_ratio, cfg.split_seed)
        train, skipped["train"] = pair.train.split_embedded()
        test = pair.test
        if cfg.use_embedding:
            test, skipped["test"] = test.split_embedded()
    with pipeline_stage("encode"):
        encoder = InputEncoder(res, cfg.prep_level, cfg.features, cfg.use_embedding)
        encoder.fit(train)
    _logger.info("prepared %d training and %d test records", len(train), len(test))
    return Prepared(cfg, res, train, test, encoder, skipped, inputs)


def partition_for(method: Method, train: Dataset, seed: int) -> TrainPartition:
    if isinstance(method, ThresholdConfig):
        return assign_axis(train, axis_embeddings(train), method)
    return assign_cluster(train, method, seed)


@dataclass(frozen=True, eq=False)
class CellResult:
    report: EvalReport
    predictor: Predictor
    partition: Optional[TrainPartition]


def fit_and_evaluate(
    prepared: Prepared,
    mode: str,
    method: Method,
    spec_a: ModelSpec,
    spec_b: Optional[ModelSpec],
    resample: ResampleConfig,
    partition: Optional[TrainPartition] = None,
) -> CellResult:
    """
    Trains one cascade (or one single-stage model) on the prepared training
    split and evaluates it on the test split.

    :param partition: a precomputed partition for ``method``; computed here
        when absent.
    """
    cfg = prepared.config
    if mode == "cascade":
        if partition is None:
            with pipeline_stage("partition"):
                partition = partition_for(method, prepared.train, cfg.split_seed)
        with pipeline_stage("train"):
            predictor = train_cascade(
                spec_a, spec_b, prepared.train, partition, resample, prepared.encoder
            )
    else:
        partition = None
        with pipeline_stage("train"):
            predictor = train_single(spec_a, prepared.train, resample, prepared.encoder)
    with pipeline_stage("evaluate"):
        y_pred = predictor.predict_records(prepared.test)
        provenance = {
            "config": cfg.to_dict(),
            "mode": mode,
            "method": method_to_dict(method) if mode == "cascade" else None,
            "predictor": dict(predictor.provenance),
            "inputs": prepared.inputs,
            "skipped": prepared.skipped,
            "train_size": len(prepared.train),
            "test_size": len(prepared.test),
            "version": __version__,
        }
        report = evaluate(prepared.test.labels(), y_pred, provenance)
    return CellResult(report, predictor, partition)


@dataclass(frozen=True)
class RunResult:
    report: EvalReport
    partition: Optional[TrainPartition]
    paths: Dict[str, Path]


def run(cfg: RunConfig) -> RunResult:
    """
    Runs one configuration end to end and writes, under ``cfg.output_dir``:
    ``report.json``, ``provenance.json``, ``model.bundle`` and, for cascades,
    ``table3.csv`` (partition counts) and ``partition.csv`` (partition audit).
    """
    prepared = prepare(cfg)
    cell = fit_and_evaluate(
        prepared, cfg.mode, cfg.method, cfg.stage_a, cfg.stage_b, cfg.resample
    )
    out = Path(cfg.output_dir)
    with pipeline_stage("write"):
        paths = {
            "report": write_json(out / "report.json", cell.report.to_dict()),
            "provenance": write_json(
                out / "provenance.json", cell.report.provenance
            ),
            "bundle": save_predictor(out / "model.bundle", cell.predictor),
        }
        if cell.partition is not None:
            paths["table3"] = write_table(
                out / "table3.csv", [cell.partition.counts()], PARTITION_COLUMNS
            )
            paths["partition"] = export_partition(
                cell.partition, prepared.train, out / "partition.csv"
            )
    _logger.info(
        "run finished: f1_macro=%.4f f1_weighted=%.4f",
        cell.report.f1_macro,
        cell.report.f1_weighted,
    )
    return RunResult(cell.report, cell.partition, paths)


ABLATION_COLUMNS = ("step", "features") + METRIC_COLUMNS + ("status", "message")


def ablation_steps(cfg: RunConfig):
    """
    The embedding alone, then the embedding plus the feature families added
    one at a time in their canonical order.
    """
    base = cfg.features or FeatureConfig()
    yield "embedding", None
    for i in range(1, len(FAMILIES) + 1):
        families = FAMILIES[:i]
        yield "+".join(families), FeatureConfig(
            families=families,
            k_per_class=base.k_per_class,
            election_date=base.election_date,
            window_days=base.window_days,
            window_count=base.window_count,
            tz_offset_hours=base.tz_offset_hours,
        )


def ablate(cfg: RunConfig) -> List[Dict[str, Any]]:
    """
    Reruns ``cfg`` once per feature step and writes ``ablation.csv`` under
    ``cfg.output_dir``. A failing step is recorded and the rest still run.
    """
    rows = []
    for step, (name, features) in enumerate(ablation_steps(cfg)):
        row: Dict[str, Any] = {"step": step, "features": name}
        try:
            step_cfg = cfg.replace(features=features, use_embedding=True)
            prepared = prepare(step_cfg)
            cell = fit_and_evaluate(
                prepared,
                cfg.mode,
                cfg.method,
                cfg.stage_a,
                cfg.stage_b,
                cfg.resample,
            )
        except StageError as exc:
            row.update(status="error", message=str(exc))
        else:
            row.update(cell.report.to_row(), status="ok", message="")
        rows.append(row)
    write_table(Path(cfg.output_dir) / "ablation.csv", rows, ABLATION_COLUMNS)
    return rows
