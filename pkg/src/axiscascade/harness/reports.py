"""
Report writers. JSON is written with sorted keys and fixed indentation and
CSV through pandas with ``\\n`` line endings, and nothing time-dependent is
recorded, so repeating a run reproduces its files byte for byte.
"""

import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np
import pandas as pd

__all__ = [
    "GRID_COLUMNS",
    "METRIC_COLUMNS",
    "PARTITION_COLUMNS",
    "jsonable",
    "write_json",
    "write_table",
]

PARTITION_COLUMNS = ("method", "label_0", "label_1", "label_2", "total")
METRIC_COLUMNS = (
    "precision_1",
    "recall_1",
    "f1_1",
    "support_1",
    "precision_0",
    "recall_0",
    "f1_0",
    "support_0",
    "f1_macro",
    "f1_weighted",
    "tp",
    "fp",
    "fn",
    "tn",
)
GRID_COLUMNS = (
    ("rank", "cell", "mode", "method", "stage_a", "stage_b")
    + METRIC_COLUMNS
    + ("status", "message", "best")
)


def jsonable(obj: Any) -> Any:
    """
    Converts numpy scalars and arrays, tuples and paths into plain JSON types.

    >>> jsonable({"a": np.int64(3), "b": (np.float64(0.5), Path("x"))})
    {'a': 3, 'b': [0.5, 'x']}
    """
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: Union[str, Path], obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_table(
    path: Union[str, Path],
    rows: Iterable[Mapping[str, Any]],
    columns: Sequence[str],
) -> Path:
    """Writes ``rows`` as CSV with exactly ``columns``, missing cells empty."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([dict(row) for row in rows], columns=list(columns))
    frame.to_csv(path, index=False, lineterminator="\n")
    return path
