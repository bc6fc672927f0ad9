"""
Engineered feature families.

Four families, each optional:

- ``text``: retweet, like, mention, link and hashtag counts, insult, person and
  organization lexicon hits, and an externally supplied ``sentiment`` score.
- ``metatext``: occurrence counts of the training vocabulary's frequent and
  class-exclusive n-grams (n = 1, 2, 3).
- ``user``: follower, following and tweet counts, and the candidate flag.
- ``time``: account age and tweet age in days, a one-hot of the publication
  day-quarter, and a one-hot of fixed-width windows before the election date.

A value already present in a record's ``features`` map overrides the computed
one with the same name. That lets precomputed files (or an external sentiment
model) feed the pipeline.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from axiscascade.core.errors import FeatureSchemaError, ValidationError
from axiscascade.data.dataset import Dataset, Document
from axiscascade.text.prep import (
    HASHTAG_PATTERN,
    MENTION_PATTERN,
    URL_PATTERN,
    PrepResources,
)

__all__ = [
    "FAMILIES",
    "FeatureConfig",
    "FeaturePipeline",
    "NgramVocab",
    "build_ngram_vocab",
    "extract_features",
]

_logger = logging.getLogger(__name__)

FAMILIES = ("text", "metatext", "user", "time")
NGRAM_ORDERS = (1, 2, 3)
SECONDS_PER_DAY = 86400.0

TEXT_FEATURES = (
    "retweet_count",
    "like_count",
    "mentions_count",
    "links_count",
    "hashtags_count",
    "insult_count",
    "person_names_count",
    "organize_names_count",
    "sentiment",
)
USER_FEATURES = ("follower_count", "following_count", "tweet_count", "is_candidate")

Ngram = Tuple[str, ...]


@dataclass(frozen=True)
class FeatureConfig:
    """
    Feature switches. ``election_date`` is an ISO date; its default is the
    2021 Iranian presidential election day.
    """

    families: Tuple[str, ...] = FAMILIES
    k_per_class: int = 20
    election_date: str = "2021-06-18"
    window_days: int = 10
    window_count: int = 6
    tz_offset_hours: float = 0.0

    def __post_init__(self):
        families = tuple(self.families)
        unknown = sorted(set(families) - set(FAMILIES))
        if unknown:
            raise ValidationError(
                f"Unknown feature families:\n"
                f"    unknown: {unknown}\n"
                f"    known:   {list(FAMILIES)}"
            )
        # Canonical order keeps feature columns stable.
        canonical = tuple(f for f in FAMILIES if f in families)
        object.__setattr__(self, "families", canonical)
        if self.k_per_class < 0:
            raise ValidationError(f"k_per_class must be >= 0, got {self.k_per_class}")
        if self.window_days <= 0 or self.window_count < 0:
            raise ValidationError(
                f"time windows need window_days > 0 and window_count >= 0, got "
                f"{self.window_days} and {self.window_count}"
            )
        try:
            date.fromisoformat(self.election_date)
        except (TypeError, ValueError):
            raise ValidationError(
                f"election_date must be an ISO date: {self.election_date!r}"
            ) from None

    @property
    def election_timestamp(self) -> float:
        day = date.fromisoformat(self.election_date)
        return datetime(day.year, day.month, day.day, tzinfo=timezone.utc).timestamp()


@dataclass(frozen=True)
class NgramVocab:
    """
    The n-grams that become metatext features: per class, the ``k`` most
    frequent n-grams of each order (``top``), and the ``k`` most frequent
    n-grams of each order that never occur in the other class (``exclusive``).
    """

    k_per_class: int
    top: Mapping[int, FrozenSet[Ngram]] = field(default_factory=dict)
    exclusive: Mapping[int, FrozenSet[Ngram]] = field(default_factory=dict)

    @property
    def ngrams(self) -> Tuple[Ngram, ...]:
        """All vocabulary n-grams, sorted by order and then lexicographically."""
        every = set()
        for mapping in (self.top, self.exclusive):
            for grams in mapping.values():
                every |= grams
        return tuple(sorted(every, key=lambda g: (len(g), g)))

    @property
    def size(self) -> int:
        return len(self.ngrams)

    def feature_names(self) -> List[str]:
        names = [f"ng:{' '.join(g)}" for g in self.ngrams]
        return names + ["exclusive0_hits", "exclusive1_hits"]


def iter_ngrams(tokens: Sequence[str], n: int) -> Iterable[Ngram]:
    """
    >>> list(iter_ngrams(["a", "b", "c"], 2))
    [('a', 'b'), ('b', 'c')]
    """
    for i in range(len(tokens) - n + 1):
        yield tuple(tokens[i : i + n])


def _top_k(counts: Counter, k: int) -> FrozenSet[Ngram]:
    ranked = sorted(counts.items(), key=lambda item: (-item[1], " ".join(item[0])))
    return frozenset(gram for gram, _ in ranked[:k])


def build_ngram_vocab(
    train: Dataset,
    k_per_class: int,
    tokens: Optional[Mapping[str, Sequence[str]]] = None,
) -> NgramVocab:
    """
    Builds the metatext vocabulary from labeled training records. Ties in
    frequency keep the lexicographically smaller n-gram.

    >>> docs = [Document("a", text="fraud vote", label=1),
    ...         Document("b", text="fraud now", label=1),
    ...         Document("c", text="vote now", label=0)]
    >>> vocab = build_ngram_vocab(Dataset(docs), 1)
    >>> sorted(vocab.exclusive[1])
    [('fraud',), ('fraud', 'now')]

    :param tokens: preprocessed tokens by record id. Defaults to splitting each
        record's text on whitespace, for already-preprocessed datasets.
    """
    if len(train) == 0:
        raise ValidationError("cannot build an n-gram vocabulary from an empty corpus")
    if k_per_class < 0:
        raise ValidationError(f"k_per_class must be >= 0, got {k_per_class}")
    train.require_labels()
    counts: Dict[Tuple[int, int], Counter] = {
        (label, n): Counter() for label in (0, 1) for n in NGRAM_ORDERS
    }
    for doc in train:
        toks = tokens[doc.id] if tokens is not None else (doc.text or "").split()
        for n in NGRAM_ORDERS:
            counts[(doc.label, n)].update(iter_ngrams(toks, n))
    top: Dict[int, FrozenSet[Ngram]] = {}
    exclusive: Dict[int, FrozenSet[Ngram]] = {}
    for label in (0, 1):
        top_grams, excl_grams = set(), set()
        for n in NGRAM_ORDERS:
            mine, theirs = counts[(label, n)], counts[(1 - label, n)]
            top_grams |= _top_k(mine, k_per_class)
            only_mine = Counter({g: c for g, c in mine.items() if g not in theirs})
            excl_grams |= _top_k(only_mine, k_per_class)
        top[label] = frozenset(top_grams)
        exclusive[label] = frozenset(excl_grams)
    vocab = NgramVocab(k_per_class=k_per_class, top=top, exclusive=exclusive)
    _logger.info("built n-gram vocabulary with %d entries", vocab.size)
    return vocab


def _count_names(tokens: Sequence[str], names: FrozenSet[Ngram]) -> int:
    if not names:
        return 0
    by_first: Dict[str, List[Ngram]] = {}
    for name in names:
        by_first.setdefault(name[0], []).append(name)
    hits = 0
    for i, tok in enumerate(tokens):
        for name in by_first.get(tok, ()):
            if tuple(tokens[i : i + len(name)]) == name:
                hits += 1
    return hits


def _meta_number(value) -> float:
    if value is None:
        return 0.0
    return float(value)


def _text_features(doc: Document, tokens: Sequence[str], res: PrepResources):
    text = doc.text or ""
    return {
        "retweet_count": _meta_number(doc.meta.retweet_count),
        "like_count": _meta_number(doc.meta.like_count),
        "mentions_count": float(len(MENTION_PATTERN.findall(text))),
        "links_count": float(len(URL_PATTERN.findall(text))),
        "hashtags_count": float(len(HASHTAG_PATTERN.findall(text))),
        "insult_count": float(sum(1 for t in tokens if t in res.insult_lexicon)),
        "person_names_count": float(_count_names(tokens, res.person_lexicon)),
        "organize_names_count": float(_count_names(tokens, res.org_lexicon)),
        "sentiment": 0.0,
    }


def _metatext_features(tokens: Sequence[str], vocab: NgramVocab):
    doc_counts: Counter = Counter()
    for n in NGRAM_ORDERS:
        doc_counts.update(iter_ngrams(tokens, n))
    feats = {f"ng:{' '.join(g)}": float(doc_counts.get(g, 0)) for g in vocab.ngrams}
    for label in (0, 1):
        feats[f"exclusive{label}_hits"] = float(
            sum(doc_counts.get(g, 0) for g in vocab.exclusive.get(label, ()))
        )
    return feats


def _user_features(doc: Document):
    return {
        "follower_count": _meta_number(doc.meta.follower_count),
        "following_count": _meta_number(doc.meta.following_count),
        "tweet_count": _meta_number(doc.meta.tweet_count),
        "is_candidate": 1.0 if doc.meta.is_candidate else 0.0,
    }


def time_feature_names(config: FeatureConfig) -> List[str]:
    names = ["account_age_days", "tweet_age_days"]
    names += [f"quarter_{q}" for q in range(4)]
    names += [f"days_before_w{w}" for w in range(config.window_count + 1)]
    return names


def _time_features(doc: Document, config: FeatureConfig):
    feats = {name: 0.0 for name in time_feature_names(config)}
    published = doc.meta.published_at
    created = doc.meta.account_created_at
    if published is not None and created is not None:
        feats["account_age_days"] = (published - created) / SECONDS_PER_DAY
    if published is not None:
        days_before = (config.election_timestamp - published) / SECONDS_PER_DAY
        feats["tweet_age_days"] = days_before
        local_hour = ((published / 3600.0) + config.tz_offset_hours) % 24.0
        feats[f"quarter_{min(3, int(local_hour // 6))}"] = 1.0
        window = min(
            config.window_count, max(0, math.floor(days_before / config.window_days))
        )
        feats[f"days_before_w{window}"] = 1.0
    return feats


def feature_names(config: FeatureConfig, vocab: Optional[NgramVocab]) -> List[str]:
    """The ordered feature names produced for ``config`` and ``vocab``."""
    names: List[str] = []
    for family in config.families:
        if family == "text":
            names += TEXT_FEATURES
        elif family == "metatext":
            names += vocab.feature_names() if vocab is not None else []
        elif family == "user":
            names += USER_FEATURES
        elif family == "time":
            names += time_feature_names(config)
    return names


def extract_features(
    doc: Document,
    tokens: Sequence[str],
    res: PrepResources,
    vocab: Optional[NgramVocab],
    config: FeatureConfig = FeatureConfig(),
) -> Dict[str, float]:
    """
    Computes the configured feature families for one record. The result is
    total: every name from `.feature_names` is present and finite.

    >>> from axiscascade.text.prep import EMPTY_RESOURCES
    >>> doc = Document("a", text="@x @y see http://t.co/z")
    >>> feats = extract_features(doc, ["see"], EMPTY_RESOURCES, None,
    ...                          FeatureConfig(families=("text",)))
    >>> feats["mentions_count"], feats["links_count"]
    (2.0, 1.0)
    """
    feats: Dict[str, float] = {}
    for family in config.families:
        if family == "text":
            feats.update(_text_features(doc, tokens, res))
        elif family == "metatext" and vocab is not None:
            feats.update(_metatext_features(tokens, vocab))
        elif family == "user":
            feats.update(_user_features(doc))
        elif family == "time":
            feats.update(_time_features(doc, config))
    for name, value in doc.features.items():
        if name in feats:
            feats[name] = float(value)
    for name, value in feats.items():
        if not math.isfinite(value):
            raise ValidationError(f"feature {name!r} of {doc.id!r} is not finite")
    return feats


class FeaturePipeline:
    """
    Fits the n-gram vocabulary on training records and then turns any records
    into a fixed-width feature matrix. Column names are frozen at fit time.
    """

    def __init__(self, res: PrepResources, config: FeatureConfig = FeatureConfig()):
        self.res = res
        self.config = config
        self.vocab: Optional[NgramVocab] = None
        self.names: Optional[Tuple[str, ...]] = None

    @property
    def is_fitted(self) -> bool:
        return self.names is not None

    def fit(
        self, train: Dataset, tokens: Mapping[str, Sequence[str]]
    ) -> "FeaturePipeline":
        if "metatext" in self.config.families:
            self.vocab = build_ngram_vocab(train, self.config.k_per_class, tokens)
        self.names = tuple(feature_names(self.config, self.vocab))
        return self

    def check_vocab(self, vocab: Optional[NgramVocab]) -> None:
        """Raises if ``vocab`` would change this pipeline's columns."""
        if not self.is_fitted:
            return
        got = tuple(feature_names(self.config, vocab))
        if got != self.names:
            raise FeatureSchemaError(
                f"Vocabulary does not match the fitted feature pipeline:\n"
                f"    fitted columns: {len(self.names)}\n"
                f"    new columns:    {len(got)}"
            )

    def transform(
        self, ds: Dataset, tokens: Mapping[str, Sequence[str]]
    ) -> np.ndarray:
        if not self.is_fitted:
            raise FeatureSchemaError("feature pipeline used before fit")
        rows = np.zeros((len(ds), len(self.names)))
        for i, doc in enumerate(ds):
            feats = extract_features(
                doc, tokens[doc.id], self.res, self.vocab, self.config
            )
            if len(feats) != len(self.names):
                raise FeatureSchemaError(
                    f"record {doc.id!r} produced {len(feats)} features, "
                    f"expected {len(self.names)}"
                )
            rows[i] = [feats[name] for name in self.names]
        return rows
