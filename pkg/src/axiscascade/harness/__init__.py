"""
The experiment harness: end-to-end runs, grid searches, feature ablation,
uncertainty sampling and corpus scoring, driven by JSON configs.
"""

from axiscascade.harness.active import select_uncertain
from axiscascade.harness.config import (
    GridSpec,
    RunConfig,
    load_grid_spec,
    load_run_config,
)
from axiscascade.harness.grid import grid
from axiscascade.harness.pipeline import ablate, prepare, run
from axiscascade.harness.scoring import score_corpus

__all__ = [
    "GridSpec",
    "RunConfig",
    "ablate",
    "grid",
    "load_grid_spec",
    "load_run_config",
    "prepare",
    "run",
    "score_corpus",
    "select_uncertain",
]
