"""
Synthetic three-component Gaussian datasets.

Positives (label 0) come from a "clean" component and an "overlap" component
whose mean sits near the negatives' mean along some axes; negatives (label 1)
come from their own component. This reproduces the geometry where some
positive messages look like negative ones, which is what the relabeling step
targets.

Ids encode the component: ``c-``, ``o-`` and ``n-`` prefixes.
"""

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from axiscascade.core.errors import ValidationError
from axiscascade.data.dataset import Dataset, Document

__all__ = [
    "BENCHMARK_DIM",
    "SynthSpec",
    "acceptance_spec",
    "component_of",
    "overlap_benchmark",
    "synth_generate",
]

Scale = Union[float, Sequence[float]]

BENCHMARK_DIM = 8
_CLEAN_MEAN = (-2.0, 1.5)
_OVERLAP_MEAN = (2.0, -1.0)
_NEG_MEAN = (2.0, 1.5)
_BENCHMARK_SCALE = 0.5


def _pad(head: Sequence[float], dim: int) -> Tuple[float, ...]:
    return tuple(head) + (0.0,) * (dim - len(head))


@dataclass(frozen=True)
class SynthSpec:
    """
    Component sizes, means and scales of a synthetic dataset. Scales are
    either one standard deviation for all axes or one per axis.

    >>> SynthSpec(dim=2, n_pos_clean=1, n_pos_overlap=0, n_neg=0)
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.ValidationError: synthetic spec needs ...
    """

    dim: int
    n_pos_clean: int
    n_pos_overlap: int
    n_neg: int
    mean_clean: Tuple[float, ...] = field(default=())
    mean_overlap: Tuple[float, ...] = field(default=())
    mean_neg: Tuple[float, ...] = field(default=())
    scale_clean: Scale = 1.0
    scale_overlap: Scale = 1.0
    scale_neg: Scale = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"synthetic dim must be >= 1, got {self.dim}")
        counts = (self.n_pos_clean, self.n_pos_overlap, self.n_neg)
        if any(int(c) != c or c < 0 for c in counts):
            raise ValidationError(f"synthetic counts must be integers >= 0: {counts}")
        if self.n_pos_clean + self.n_pos_overlap < 1 or self.n_neg < 1:
            raise ValidationError(
                f"synthetic spec needs at least one positive and one negative:\n"
                f"    counts: {counts}"
            )
        for name in ("mean_clean", "mean_overlap", "mean_neg"):
            mean = getattr(self, name) or (0.0,) * self.dim
            if len(mean) != self.dim:
                raise ValidationError(
                    f"{name} has length {len(mean)}, expected dim={self.dim}"
                )
            object.__setattr__(self, name, tuple(float(x) for x in mean))
        for name in ("scale_clean", "scale_overlap", "scale_neg"):
            scale = np.broadcast_to(
                np.asarray(getattr(self, name), dtype=float), (self.dim,)
            )
            if not np.all(np.isfinite(scale)) or np.any(scale <= 0):
                raise ValidationError(f"{name} must be positive: {getattr(self, name)}")

    @property
    def label_counts(self) -> dict:
        return {0: self.n_pos_clean + self.n_pos_overlap, 1: self.n_neg}


def synth_generate(spec: SynthSpec, seed: int) -> Dataset:
    """
    Draws a labeled dataset from ``spec``. Records are shuffled so classes
    are interleaved; the result depends only on ``(spec, seed)``.

    >>> spec = SynthSpec(dim=3, n_pos_clean=50, n_pos_overlap=25, n_neg=75)
    >>> synth_generate(spec, seed=0).label_counts()
    {0: 75, 1: 75}
    """
    rng = np.random.default_rng(seed)
    parts = []
    for prefix, n, mean, scale, label in (
        ("c", spec.n_pos_clean, spec.mean_clean, spec.scale_clean, 0),
        ("o", spec.n_pos_overlap, spec.mean_overlap, spec.scale_overlap, 0),
        ("n", spec.n_neg, spec.mean_neg, spec.scale_neg, 1),
    ):
        points = rng.normal(
            loc=np.asarray(mean),
            scale=np.asarray(scale, dtype=float),
            size=(n, spec.dim),
        )
        for i in range(n):
            parts.append((f"{prefix}-{i:06d}", points[i], label))
    order = rng.permutation(len(parts))
    return Dataset(
        Document(id=parts[i][0], label=parts[i][2], embedding=parts[i][1])
        for i in order
    )


def component_of(doc_id: str) -> str:
    """
    >>> component_of("o-000003")
    'overlap'
    """
    return {"c": "clean", "o": "overlap", "n": "negative"}[doc_id.split("-", 1)[0]]


def overlap_benchmark(n: int = 4000, overlap_fraction: float = 0.25) -> SynthSpec:
    """
    The cascade-lift benchmark: a quarter of the records are negatives, and
    ``overlap_fraction`` of the positives share the negatives' position on the
    first axis while differing on the second.

    >>> spec = overlap_benchmark()
    >>> spec.n_neg, spec.n_pos_clean, spec.n_pos_overlap
    (1000, 2250, 750)
    """
    n_neg = n // 4
    n_pos = n - n_neg
    n_overlap = int(round(overlap_fraction * n_pos))
    return SynthSpec(
        dim=BENCHMARK_DIM,
        n_pos_clean=n_pos - n_overlap,
        n_pos_overlap=n_overlap,
        n_neg=n_neg,
        mean_clean=_pad(_CLEAN_MEAN, BENCHMARK_DIM),
        mean_overlap=_pad(_OVERLAP_MEAN, BENCHMARK_DIM),
        mean_neg=_pad(_NEG_MEAN, BENCHMARK_DIM),
        scale_clean=_BENCHMARK_SCALE,
        scale_overlap=_BENCHMARK_SCALE,
        scale_neg=_BENCHMARK_SCALE,
    )


def acceptance_spec() -> SynthSpec:
    """
    A 5,100-record dataset with 1,447 negatives, the class sizes of the
    original annotated corpus.

    >>> acceptance_spec().label_counts
    {0: 3653, 1: 1447}
    """
    return SynthSpec(
        dim=BENCHMARK_DIM,
        n_pos_clean=2740,
        n_pos_overlap=913,
        n_neg=1447,
        mean_clean=_pad(_CLEAN_MEAN, BENCHMARK_DIM),
        mean_overlap=_pad(_OVERLAP_MEAN, BENCHMARK_DIM),
        mean_neg=_pad(_NEG_MEAN, BENCHMARK_DIM),
        scale_clean=_BENCHMARK_SCALE,
        scale_overlap=_BENCHMARK_SCALE,
        scale_neg=_BENCHMARK_SCALE,
    )
