"""
Word-vector lexicons, document embeddings, and cosine similarity.

Vector files use the GloVe text layout: one token per line followed by its
components, separated by single spaces. Tokens are looked up as they appear
in the file, so the lexicon should use the same case-folded form that
`~axiscascade.text.prep.preprocess` produces.
"""

import logging
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import numpy as np

from axiscascade.core.errors import (
    DimensionMismatchError,
    DuplicateTokenWarning,
    LexiconFormatError,
    ValidationError,
)

__all__ = [
    "WordEmbeddings",
    "cosine",
    "cosine_rows",
    "doc_embedding",
    "load_word_vectors",
]

_logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WordEmbeddings:
    vectors: Dict[str, np.ndarray]
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"word vectors need dim >= 1, got {self.dim}")
        for token, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise DimensionMismatchError(
                    f"vector for {token!r} has shape {vec.shape}, expected "
                    f"({self.dim},)"
                )

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def get(self, token: str) -> Optional[np.ndarray]:
        return self.vectors.get(token)


def load_word_vectors(path: Union[str, Path]) -> WordEmbeddings:
    """
    Reads a GloVe-style text file. The first non-blank line fixes ``dim``.

    :raises LexiconFormatError: the file is empty or a value is not a number.
    :raises DimensionMismatchError: a line has the wrong number of components;
        the error names the line.
    """
    path = Path(path)
    vectors: Dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fobj:
        for lineno, line in enumerate(fobj, start=1):
            parts = line.rstrip("\r\n").split(" ")
            if not line.strip():
                continue
            token, values = parts[0], [p for p in parts[1:] if p]
            if not token or not values:
                raise LexiconFormatError(
                    "expected a token followed by numbers", path=str(path), line=lineno
                )
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise DimensionMismatchError(
                    f"line has {len(values)} components, expected {dim}",
                    path=str(path),
                    line=lineno,
                )
            try:
                vec = np.array([float(v) for v in values])
            except ValueError as exc:
                raise LexiconFormatError(
                    f"bad number: {exc}", path=str(path), line=lineno
                ) from exc
            if not np.all(np.isfinite(vec)):
                raise LexiconFormatError(
                    "non-finite component", path=str(path), line=lineno
                )
            if token in vectors:
                message = f"{path}:{lineno}: duplicate token {token!r}; last one wins"
                _logger.warning(message)
                warnings.warn(message, DuplicateTokenWarning, stacklevel=2)
            vec.setflags(write=False)
            vectors[token] = vec
    if dim is None:
        raise LexiconFormatError("empty lexicon", path=str(path))
    _logger.info("loaded %d word vectors of dim %d from %s", len(vectors), dim, path)
    return WordEmbeddings(vectors=vectors, dim=dim)


def doc_embedding(tokens: Iterable[str], we: WordEmbeddings) -> Optional[np.ndarray]:
    """
    Mean of the vectors of in-lexicon tokens, or `None` if no token is known.
    Repeated tokens count once per occurrence. Known vectors are summed in
    sorted token order, so the result does not depend on token order.

    >>> we = WordEmbeddings({"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])}, 2)
    >>> doc_embedding(["a", "zzz", "b"], we)
    array([0.5, 0.5])
    >>> doc_embedding(["zzz"], we) is None
    True
    """
    known = sorted(t for t in tokens if t in we.vectors)
    if not known:
        return None
    return np.mean(np.vstack([we.vectors[t] for t in known]), axis=0)


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a vector, got shape {arr.shape}")
    return arr


def cosine(a, b) -> float:
    """
    Cosine similarity, clipped to ``[-1, 1]``.

    >>> cosine([1, 0], [0, 1])
    0.0
    >>> cosine([1, 0], [1, 1])
    0.7071067811865475
    >>> cosine([0, 0], [1, 1])
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.ValidationError: cosine of a zero-norm vector
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"cosine of vectors with dims {a.shape[0]} and {b.shape[0]}"
        )
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine of a zero-norm vector")
    return float(np.clip(float(np.dot(a, b)) / (na * nb), -1.0, 1.0))


def cosine_rows(X: np.ndarray, v) -> np.ndarray:
    """
    Cosine similarity of every row of ``X`` with ``v``; the vectorized form of
    `.cosine`.
    """
    X = np.asarray(X, dtype=float)
    v = _as_vector(v, "v")
    if X.ndim != 2 or X.shape[1] != v.shape[0]:
        raise DimensionMismatchError(
            f"cannot compare rows of shape {X.shape} with a vector of dim "
            f"{v.shape[0]}"
        )
    row_norms = np.linalg.norm(X, axis=1)
    nv = float(np.linalg.norm(v))
    if nv == 0.0 or np.any(row_norms == 0.0):
        raise ValidationError("cosine of a zero-norm vector")
    return np.clip((X @ v) / (row_norms * nv), -1.0, 1.0)
