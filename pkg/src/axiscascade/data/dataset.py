"""
Core record types and dataset IO.

Records live in a line-delimited JSON file, one object per line::

    {"id": "t1", "text": "...", "label": 1, "embedding": [0.1, 0.2],
     "features": {"sentiment": -0.4},
     "meta": {"retweet_count": 3, "like_count": 10, "follower_count": 50,
              "following_count": 20, "tweet_count": 900,
              "account_created_at": 1577836800, "published_at": 1622505600,
              "is_candidate": false}}

Only ``id`` is required. Unknown fields are ignored. Label ``1`` marks a
negative (attack) message and ``0`` a positive one.
"""

import json
import logging
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Tuple,
    Union,
)

import numpy as np

from axiscascade.core.errors import (
    DatasetFormatError,
    DimensionMismatchError,
    DuplicateIdError,
    MissingEmbeddingError,
    UnlabeledRecordError,
    ValidationError,
)

__all__ = [
    "Dataset",
    "Document",
    "Meta",
    "SplitPair",
    "load_jsonl",
    "round_half_up",
    "save_jsonl",
    "stratified_split",
]

_logger = logging.getLogger(__name__)

LABELS = (0, 1)


@dataclass(frozen=True)
class Meta:
    """Per-record metadata. Absent values are `None`."""

    retweet_count: Optional[float] = None
    like_count: Optional[float] = None
    follower_count: Optional[float] = None
    following_count: Optional[float] = None
    tweet_count: Optional[float] = None
    account_created_at: Optional[float] = None
    published_at: Optional[float] = None
    is_candidate: Optional[bool] = None

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "Meta":
        if not isinstance(raw, Mapping):
            raise ValueError("'meta' must be an object")
        kwargs = {}
        for f in fields(cls):
            value = raw.get(f.name)
            if value is None:
                continue
            if f.name == "is_candidate":
                kwargs[f.name] = bool(value)
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"meta.{f.name} must be a number, got {value!r}")
                kwargs[f.name] = value
        return cls(**kwargs)

    def as_dict(self) -> Dict[str, Any]:
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if getattr(self, f.name) is not None
        }


@dataclass(frozen=True)
class Document:
    """
    One tweet-like record.

    >>> doc = Document("a", text="hello", label=1, embedding=[1.0, 0.0])
    >>> doc.embedding
    array([1., 0.])
    >>> doc.dim
    2
    """

    id: str
    text: Optional[str] = None
    label: Optional[int] = None
    embedding: Optional[np.ndarray] = field(default=None, compare=False)
    features: Mapping[str, float] = field(default_factory=dict)
    meta: Meta = field(default_factory=Meta)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError(f"record id must be a non-empty string: {self.id!r}")
        if self.label is not None:
            if isinstance(self.label, bool) or self.label not in LABELS:
                raise ValidationError(
                    f"label of {self.id!r} must be 0 or 1, got {self.label!r}"
                )
            object.__setattr__(self, "label", int(self.label))
        if self.embedding is not None:
            emb = np.asarray(self.embedding, dtype=float)
            if emb.ndim != 1 or emb.size == 0:
                raise ValidationError(
                    f"embedding of {self.id!r} must be a non-empty vector"
                )
            if not np.all(np.isfinite(emb)):
                raise ValidationError(f"embedding of {self.id!r} is not finite")
            emb.setflags(write=False)
            object.__setattr__(self, "embedding", emb)
        object.__setattr__(self, "features", dict(self.features))

    @property
    def dim(self) -> Optional[int]:
        return None if self.embedding is None else int(self.embedding.shape[0])

    def replace(self, **changes) -> "Document":
        """Returns a copy with some fields changed."""
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(changes)
        return Document(**current)

    def as_record(self) -> Dict[str, Any]:
        """Returns the JSON-ready dict written by `.save_jsonl`."""
        record: Dict[str, Any] = {"id": self.id}
        if self.text is not None:
            record["text"] = self.text
        if self.label is not None:
            record["label"] = self.label
        if self.embedding is not None:
            record["embedding"] = [float(x) for x in self.embedding]
        if self.features:
            record["features"] = {k: float(v) for k, v in self.features.items()}
        meta = self.meta.as_dict()
        if meta:
            record["meta"] = meta
        return record

    @classmethod
    def from_record(cls, raw: Mapping[str, Any]) -> "Document":
        if not isinstance(raw, Mapping):
            raise ValueError("record must be a JSON object")
        if "id" not in raw or not isinstance(raw["id"], str):
            raise ValueError("record needs a string 'id'")
        text = raw.get("text")
        if text is not None and not isinstance(text, str):
            raise ValueError("'text' must be a string")
        features = raw.get("features") or {}
        if not isinstance(features, Mapping):
            raise ValueError("'features' must be an object")
        for name, value in features.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"feature {name!r} must be a number")
        embedding = raw.get("embedding")
        if embedding is not None:
            if not isinstance(embedding, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool)
                for x in embedding
            ):
                raise ValueError("'embedding' must be an array of numbers")
        return cls(
            id=raw["id"],
            text=text,
            label=raw.get("label"),
            embedding=embedding,
            features={k: float(v) for k, v in features.items()},
            meta=Meta.from_dict(raw.get("meta") or {}),
        )


class Dataset:
    """
    An ordered, immutable collection of `.Document` objects with unique ids
    and one shared embedding dimension.

    >>> ds = Dataset([Document("a", label=0), Document("b", label=1)])
    >>> len(ds), ds.dim, ds.ids
    (2, None, ('a', 'b'))
    >>> Dataset([Document("a"), Document("a")])
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.DuplicateIdError: duplicate id 'a'
    """

    def __init__(self, records: Iterable[Document] = ()):
        self._records: Tuple[Document, ...] = tuple(records)
        self._index: Dict[str, int] = {}
        dim = None
        for i, doc in enumerate(self._records):
            if doc.id in self._index:
                raise DuplicateIdError(f"duplicate id {doc.id!r}")
            self._index[doc.id] = i
            if doc.embedding is not None:
                if dim is None:
                    dim = doc.dim
                elif doc.dim != dim:
                    raise DimensionMismatchError(
                        f"embedding of {doc.id!r} has dimension {doc.dim}, "
                        f"expected {dim}"
                    )
        self._dim = dim

    @property
    def records(self) -> Tuple[Document, ...]:
        return self._records

    @property
    def dim(self) -> Optional[int]:
        return self._dim

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(doc.id for doc in self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._records)

    def __getitem__(self, idx: int) -> Document:
        return self._records[idx]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return [d.as_record() for d in self] == [d.as_record() for d in other]

    def __repr__(self) -> str:
        return f"Dataset(n={len(self)}, dim={self.dim})"

    def get(self, doc_id: str) -> Document:
        return self._records[self._index[doc_id]]

    def subset(self, ids: Iterable[str]) -> "Dataset":
        """Returns the records whose ids are in ``ids``, in this dataset's order."""
        wanted = set(ids)
        return Dataset(doc for doc in self._records if doc.id in wanted)

    def relabel(self, labels: Mapping[str, int]) -> "Dataset":
        """
        Returns the records named in ``labels``, in this dataset's order, with
        their labels replaced.
        """
        return Dataset(
            doc.replace(label=labels[doc.id])
            for doc in self._records
            if doc.id in labels
        )

    def labels(self) -> np.ndarray:
        """Gold labels as an int array; raises if any record is unlabeled."""
        self.require_labels()
        return np.array([doc.label for doc in self._records], dtype=int)

    def require_labels(self) -> None:
        for doc in self._records:
            if doc.label is None:
                raise UnlabeledRecordError(f"record {doc.id!r} has no label")

    def label_counts(self) -> Dict[int, int]:
        counts = {label: 0 for label in LABELS}
        for doc in self._records:
            if doc.label is not None:
                counts[doc.label] += 1
        return counts

    def split_embedded(self) -> Tuple["Dataset", List[str]]:
        """
        Returns ``(embedded, skipped_ids)``: the records that carry embeddings,
        and the ids of those that do not.
        """
        kept = [doc for doc in self._records if doc.embedding is not None]
        skipped = [doc.id for doc in self._records if doc.embedding is None]
        if skipped:
            _logger.info("%d records have no embedding and are skipped", len(skipped))
        return Dataset(kept), skipped

    def embedding_matrix(self) -> np.ndarray:
        """Stacks all embeddings into an ``(n, dim)`` array."""
        for doc in self._records:
            if doc.embedding is None:
                raise MissingEmbeddingError(f"record {doc.id!r} has no embedding")
        if not self._records:
            return np.zeros((0, self._dim or 0))
        return np.vstack([doc.embedding for doc in self._records])


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    ratio: float


def load_jsonl(path: Union[str, Path]) -> Dataset:
    """
    Loads a dataset from a line-delimited JSON file, keeping file order.
    Blank lines are skipped.

    :raises DatasetFormatError: a line is not a valid record; the error
        carries the 1-based line number.
    :raises DimensionMismatchError: an embedding's length differs from the
        first embedded record's.
    :raises DuplicateIdError: an id repeats.
    """
    path = Path(path)
    docs: List[Document] = []
    seen: Dict[str, int] = {}
    dim = None
    with open(path, encoding="utf-8") as fobj:
        for lineno, line in enumerate(fobj, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                doc = Document.from_record(raw)
            except (json.JSONDecodeError, ValueError, TypeError) as exc:
                raise DatasetFormatError(
                    f"malformed record: {exc}", path=str(path), line=lineno
                ) from exc
            if doc.id in seen:
                raise DuplicateIdError(
                    f"duplicate id {doc.id!r} (first seen on line {seen[doc.id]})",
                    path=str(path),
                    line=lineno,
                )
            seen[doc.id] = lineno
            if doc.embedding is not None:
                if dim is None:
                    dim = doc.dim
                elif doc.dim != dim:
                    raise DimensionMismatchError(
                        f"embedding has dimension {doc.dim}, expected {dim}",
                        path=str(path),
                        line=lineno,
                    )
            docs.append(doc)
    _logger.info("loaded %d records from %s", len(docs), path)
    return Dataset(docs)


def save_jsonl(ds: Dataset, path: Union[str, Path]) -> Path:
    """Writes ``ds`` in the format read by `.load_jsonl`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fobj:
        for doc in ds:
            fobj.write(json.dumps(doc.as_record(), ensure_ascii=False, sort_keys=True))
            fobj.write("\n")
    return path


def round_half_up(value: Fraction) -> int:
    """
    >>> round_half_up(Fraction(5, 2)), round_half_up(Fraction(122995, 100))
    (3, 1230)
    """
    return math.floor(value + Fraction(1, 2))


def _ratio_fraction(ratio: float) -> Fraction:
    # repr() gives the shortest decimal that round-trips, so 0.85 is exact.
    return Fraction(repr(float(ratio)))


def stratified_train_counts(
    class_sizes: Mapping[int, int], ratio: float
) -> Dict[int, int]:
    """
    Per-class train counts: every class except the largest is rounded half-up
    on its own, and the largest class takes whatever makes the total equal
    ``round_half_up(ratio * N)``. Equal-size classes resolve to the lowest
    label as the largest.

    >>> stratified_train_counts({0: 3653, 1: 1447}, 0.85)
    {0: 3105, 1: 1230}
    >>> stratified_train_counts({0: 10, 1: 10}, 0.8)
    {0: 8, 1: 8}
    """
    frac = _ratio_fraction(ratio)
    present = {label: n for label, n in class_sizes.items() if n > 0}
    counts = {label: 0 for label in class_sizes}
    if not present:
        return counts
    majority = min(present, key=lambda label: (-present[label], label))
    total = round_half_up(frac * sum(present.values()))
    for label, n in present.items():
        if label != majority:
            counts[label] = min(n, round_half_up(frac * n))
    rest = total - sum(counts.values())
    counts[majority] = max(0, min(present[majority], rest))
    return counts


def stratified_split(ds: Dataset, ratio: float, seed: int) -> SplitPair:
    """
    Splits a labeled dataset into train and test, stratifying on the label.

    Within each class, ids are sorted and shuffled with a generator seeded by
    ``(seed, label)``; the first ``n_train`` go to train. Both halves keep the
    input order.

    >>> docs = [Document(f"d{i:02d}", label=i % 2) for i in range(20)]
    >>> pair = stratified_split(Dataset(docs), 0.8, seed=1)
    >>> len(pair.train), len(pair.test)
    (16, 4)
    >>> pair.test.label_counts()
    {0: 2, 1: 2}
    """
    if not (0 < float(ratio) <= 1):
        raise ValidationError(f"split ratio must be in (0, 1], got {ratio!r}")
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValidationError(f"split seed must be a non-negative integer: {seed!r}")
    ds.require_labels()
    by_class: Dict[int, List[str]] = {label: [] for label in LABELS}
    for doc in ds:
        by_class[doc.label].append(doc.id)
    counts = stratified_train_counts(
        {label: len(ids) for label, ids in by_class.items()}, ratio
    )
    train_ids = set()
    for label, ids in by_class.items():
        ordered = sorted(ids)
        rng = np.random.default_rng([int(seed), label])
        order = rng.permutation(len(ordered))
        train_ids.update(ordered[i] for i in order[: counts[label]])
    train = Dataset(doc for doc in ds if doc.id in train_ids)
    test = Dataset(doc for doc in ds if doc.id not in train_ids)
    _logger.info(
        "split %d records into %d train / %d test (ratio=%s, seed=%s)",
        len(ds),
        len(train),
        len(test),
        ratio,
        seed,
    )
    return SplitPair(train=train, test=test, seed=int(seed), ratio=float(ratio))
