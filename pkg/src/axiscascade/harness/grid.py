"""
Grid search over partition methods and stage-model kinds.

All cells share one prepared split. Partitions are computed once per method
in the calling process; the cells (one cascade per method and kind pair, plus
optional single-stage baselines) are then submitted to an executor from
`axiscascade.parallel`. Cell ``i`` trains its models with seed
``split_seed ^ i``. A failing cell becomes a row with ``status="error"``.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from axiscascade.core.errors import CascadeError, StageError
from axiscascade.core.sys import derive_seed
from axiscascade.harness.config import GridSpec, Method, RunConfig
from axiscascade.harness.pipeline import (
    Prepared,
    fit_and_evaluate,
    partition_for,
    pipeline_stage,
    prepare,
)
from axiscascade.harness.reports import GRID_COLUMNS, write_table
from axiscascade.models import ModelSpec, filter_hyperparams
from axiscascade.parallel import executor_ctx
from axiscascade.splitcraft import TrainPartition

__all__ = ["GridCell", "grid", "grid_cells", "rank_rows"]

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridCell:
    index: int
    mode: str
    method: Optional[Method]
    spec_a: ModelSpec
    spec_b: Optional[ModelSpec]

    @property
    def method_tag(self) -> str:
        return "single" if self.method is None else self.method.tag


def grid_cells(gs: GridSpec, base_seed: int) -> List[GridCell]:
    """
    Enumerates the cells: every method with every (stage A, stage B) kind
    pair, then one single-stage cell per kind.
    """
    combos: List[Tuple[str, Optional[Method], str, Optional[str]]] = []
    for method in gs.methods:
        for kind_a in gs.stage_a_kinds:
            for kind_b in gs.stage_b_kinds:
                combos.append(("cascade", method, kind_a, kind_b))
    if gs.include_single_stage:
        combos.extend(("single", None, kind, None) for kind in gs.single_kinds)
    cells = []
    for index, (mode, method, kind_a, kind_b) in enumerate(combos):
        seed = derive_seed(base_seed, index)
        spec_a = ModelSpec(kind_a, filter_hyperparams(kind_a, gs.hyperparams), seed)
        spec_b = None
        if kind_b is not None:
            spec_b = ModelSpec(kind_b, filter_hyperparams(kind_b, gs.hyperparams), seed)
        cells.append(GridCell(index, mode, method, spec_a, spec_b))
    return cells


def _base_row(cell: GridCell) -> Dict[str, Any]:
    return {
        "cell": cell.index,
        "mode": cell.mode,
        "method": cell.method_tag,
        "stage_a": cell.spec_a.tag,
        "stage_b": "" if cell.spec_b is None else cell.spec_b.tag,
    }


def _run_cell(
    prepared: Prepared, cell: GridCell, partition: Optional[TrainPartition]
) -> Dict[str, Any]:
    row = _base_row(cell)
    try:
        result = fit_and_evaluate(
            prepared,
            cell.mode,
            cell.method,
            cell.spec_a,
            cell.spec_b,
            prepared.config.resample,
            partition=partition,
        )
    except CascadeError as exc:
        _logger.warning("grid cell %d failed: %s", cell.index, exc)
        row.update(status="error", message=str(exc))
    else:
        row.update(result.report.to_row(), status="ok", message="")
    return row


def rank_rows(rows: List[Dict[str, Any]], metric: str) -> List[Dict[str, Any]]:
    """
    Orders rows by ``metric`` (descending, ties by cell index), failed cells
    last, numbers them from 1 and flags the top successful row as best.

    >>> rows = [
    ...     {"cell": 0, "status": "ok", "f1_macro": 0.7},
    ...     {"cell": 1, "status": "error"},
    ...     {"cell": 2, "status": "ok", "f1_macro": 0.9},
    ... ]
    >>> [(r["cell"], r["rank"], r["best"]) for r in rank_rows(rows, "f1_macro")]
    [(2, 1, True), (0, 2, False), (1, 3, False)]
    """

    def key(row):
        if row.get("status") != "ok":
            return (1, 0.0, row["cell"])
        return (0, -float(row[metric]), row["cell"])

    ranked = [dict(row) for row in sorted(rows, key=key)]
    for rank, row in enumerate(ranked, start=1):
        row["rank"] = rank
        row["best"] = False
    if ranked and ranked[0].get("status") == "ok":
        ranked[0]["best"] = True
    return ranked


def grid(
    cfg: RunConfig, gs: GridSpec, prepared: Optional[Prepared] = None
) -> List[Dict[str, Any]]:
    """
    Runs every cell of ``gs`` on the split prepared from ``cfg`` and writes the
    ranked table to ``table4.csv`` under ``cfg.output_dir``.

    :return: the ranked rows.
    """
    if prepared is None:
        prepared = prepare(cfg)
    cells = grid_cells(gs, cfg.split_seed)
    partitions: Dict[str, Any] = {}
    for method in gs.methods:
        try:
            with pipeline_stage("partition"):
                partitions[method.tag] = partition_for(
                    method, prepared.train, cfg.split_seed
                )
        except StageError as exc:
            partitions[method.tag] = exc
    rows: List[Optional[Dict[str, Any]]] = [None] * len(cells)
    futures = {}
    with executor_ctx(gs.executor, gs.max_workers) as exe:
        for cell in cells:
            part = partitions.get(cell.method_tag) if cell.mode == "cascade" else None
            if isinstance(part, StageError):
                rows[cell.index] = dict(
                    _base_row(cell), status="error", message=str(part)
                )
                continue
            futures[cell.index] = exe.submit(_run_cell, prepared, cell, part)
        for index, fut in futures.items():
            try:
                rows[index] = fut.result()
            except Exception as exc:
                rows[index] = dict(
                    _base_row(cells[index]), status="error", message=str(exc)
                )
    ranked = rank_rows(rows, gs.selection_metric)
    write_table(Path(cfg.output_dir) / "table4.csv", ranked, GRID_COLUMNS)
    best = ranked[0] if ranked and ranked[0]["best"] else None
    if best is not None:
        _logger.info(
            "best cell: %s %s-%s %s=%.4f",
            best["method"],
            best["stage_a"],
            best["stage_b"],
            gs.selection_metric,
            best[gs.selection_metric],
        )
    return ranked
