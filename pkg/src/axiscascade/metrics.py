"""
Confusion counts and the precision / recall / F1 family. Every report in the
package is computed here.

Zero denominators are pinned: precision is 0 when nothing was predicted
positive, recall is 0 when there are no positives, and F1 is 0 when both are.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Mapping, Sequence, Tuple

import numpy as np

from axiscascade.core.errors import ValidationError

__all__ = [
    "ClassScores",
    "Confusion",
    "EvalReport",
    "confusion",
    "evaluate",
    "f1_macro",
    "f1_weighted",
    "prf1",
]


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 0:
                raise ValidationError(f"confusion count {name} must be >= 0: {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "Confusion":
        """The same counts seen from the other class."""
        return Confusion(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)


def _binary(name: str, values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a 1-D label vector")
    if not np.isin(arr, (0, 1)).all():
        raise ValidationError(
            f"{name} must contain only 0 and 1:\n"
            f"    found: {sorted(set(arr.tolist()))}"
        )
    return arr.astype(int)


def confusion(y_true, y_pred, positive_class: int = 1) -> Confusion:
    """
    >>> confusion([1, 1, 0, 0], [1, 0, 1, 0])
    Confusion(tp=1, fp=1, fn=1, tn=1)
    >>> confusion([1, 1, 0], [1, 1, 1], positive_class=0)
    Confusion(tp=0, fp=0, fn=1, tn=2)
    """
    t = _binary("y_true", y_true)
    p = _binary("y_pred", y_pred)
    if len(t) != len(p) or len(t) == 0:
        raise ValidationError(
            f"label vectors must be non-empty and of equal length:\n"
            f"    y_true: {len(t)}\n"
            f"    y_pred: {len(p)}"
        )
    if positive_class not in (0, 1):
        raise ValidationError(f"positive_class must be 0 or 1, got {positive_class!r}")
    t_pos = t == positive_class
    p_pos = p == positive_class
    return Confusion(
        tp=int(np.sum(t_pos & p_pos)),
        fp=int(np.sum(~t_pos & p_pos)),
        fn=int(np.sum(t_pos & ~p_pos)),
        tn=int(np.sum(~t_pos & ~p_pos)),
    )


def prf1(c: Confusion) -> Tuple[float, float, float]:
    """
    >>> prf1(Confusion(tp=2, fp=1, fn=1, tn=0)) == (2 / 3, 2 / 3, 2 / 3)
    True
    >>> prf1(Confusion(tp=0, fp=0, fn=5, tn=3))
    (0.0, 0.0, 0.0)
    """
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * c.tp / (2 * c.tp + c.fp + c.fn) if c.tp else 0.0
    return float(precision), float(recall), float(f1)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int

    @classmethod
    def from_confusion(cls, c: Confusion) -> "ClassScores":
        return cls(*prf1(c), support=c.tp + c.fn)


def f1_macro(scores: Sequence[ClassScores]) -> float:
    """The unweighted mean of the class F1 values."""
    if not scores:
        raise ValidationError("f1_macro needs at least one class")
    return float(sum(s.f1 for s in scores) / len(scores))


def f1_weighted(scores: Sequence[ClassScores], supports=None) -> float:
    """
    The class F1 values weighted by support fraction.

    >>> a = ClassScores(0.0, 0.0, 0.6, 217)
    >>> b = ClassScores(0.0, 0.0, 0.86, 548)
    >>> round(f1_weighted([a, b]), 4), round(f1_macro([a, b]), 2)
    (0.7862, 0.73)
    """
    if supports is None:
        supports = [s.support for s in scores]
    if len(supports) != len(scores):
        raise ValidationError("one support per class is required")
    total = sum(supports)
    if total <= 0:
        raise ValidationError("f1_weighted needs a positive total support")
    return float(sum(s.f1 * w for s, w in zip(scores, supports)) / total)


@dataclass(frozen=True)
class EvalReport:
    """
    Per-class scores for label 1 and label 0, the two F1 averages, the
    label-1 confusion counts, and the provenance of the run that produced it.
    """

    class_1: ClassScores
    class_0: ClassScores
    f1_macro: float
    f1_weighted: float
    confusion: Confusion
    provenance: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_confusion(
        cls, c: Confusion, provenance: Mapping[str, Any] = None
    ) -> "EvalReport":
        """Rebuilds every score from label-1 confusion counts."""
        class_1 = ClassScores.from_confusion(c)
        class_0 = ClassScores.from_confusion(c.swapped())
        scores = [class_1, class_0]
        return cls(
            class_1=class_1,
            class_0=class_0,
            f1_macro=f1_macro(scores),
            f1_weighted=f1_weighted(scores),
            confusion=c,
            provenance=dict(provenance or {}),
        )

    def to_row(self) -> Dict[str, Any]:
        """A flat dict: one row of the grid table."""
        row = {}
        for label, s in (("1", self.class_1), ("0", self.class_0)):
            row[f"precision_{label}"] = s.precision
            row[f"recall_{label}"] = s.recall
            row[f"f1_{label}"] = s.f1
            row[f"support_{label}"] = s.support
        row["f1_macro"] = self.f1_macro
        row["f1_weighted"] = self.f1_weighted
        row.update(asdict(self.confusion))
        return row

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class_1": asdict(self.class_1),
            "class_0": asdict(self.class_0),
            "f1_macro": self.f1_macro,
            "f1_weighted": self.f1_weighted,
            "confusion": asdict(self.confusion),
            "provenance": dict(self.provenance),
        }


def evaluate(y_true, y_pred, provenance: Mapping[str, Any] = None) -> EvalReport:
    """
    >>> report = evaluate([1, 1, 0, 0], [1, 0, 0, 0])
    >>> round(report.class_1.f1, 4), report.class_0.recall, round(report.f1_macro, 4)
    (0.6667, 1.0, 0.7333)
    """
    return EvalReport.from_confusion(confusion(y_true, y_pred, 1), provenance)
