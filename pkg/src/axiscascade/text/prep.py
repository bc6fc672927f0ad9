"""
The three preprocessing levels.

Each level extends the previous one:

- ``L1``: map emojis to text, drop unmapped emojis, split hashtags on ``_``,
  case-fold, collapse runs of three or more identical characters, drop tokens
  containing digits, drop punctuation and other non-letter characters, and
  drop tokens shorter than three characters.
- ``L2``: ``L1`` plus stopword removal.
- ``L3``: ``L2``, with URLs and ``@``-mentions removed before tokenizing.

No language data is built in: stopwords, the emoji map and the lexicons come
from `.PrepResources`, usually read with `.load_resources`.

>>> preprocess("see http://t.co/x @user now!!!", PrepLevel.L3, EMPTY_RESOURCES)
['see', 'now']
>>> preprocess("#free_election veeeery good", PrepLevel.L1, EMPTY_RESOURCES)
['free', 'election', 'very', 'good']
"""

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from axiscascade.core.errors import LexiconFormatError, ValidationError

__all__ = [
    "EMPTY_RESOURCES",
    "MENTION_PATTERN",
    "URL_PATTERN",
    "PrepLevel",
    "PrepResources",
    "is_removable",
    "load_resources",
    "normalize_token",
    "preprocess",
]

_logger = logging.getLogger(__name__)

URL_PATTERN = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
MENTION_PATTERN = re.compile(r"@\w+")
HASHTAG_PATTERN = re.compile(r"#(\w+)")
_RUN_PATTERN = re.compile(r"(.)\1{2,}")
_EMOJI_PATTERN = re.compile(
    "["
    "\U0001f000-\U0001faff"
    "\u2600-\u27bf"
    "\u2b00-\u2bff"
    "\ufe00-\ufe0f"
    "\u200d"
    "\u20e3"
    "]+"
)
MIN_TOKEN_LENGTH = 3


class PrepLevel(Enum):
    L1 = 1
    L2 = 2
    L3 = 3

    @classmethod
    def get(cls, arg: Union["PrepLevel", str, int]) -> "PrepLevel":
        """
        >>> PrepLevel.get("l2"), PrepLevel.get(3)
        (<PrepLevel.L2: 2>, <PrepLevel.L3: 3>)
        """
        if isinstance(arg, cls):
            return arg
        try:
            if isinstance(arg, str):
                return cls[arg.upper()]
            if isinstance(arg, int) and not isinstance(arg, bool):
                return cls(arg)
        except (KeyError, ValueError):
            pass
        raise ValidationError(f"unknown preprocessing level: {arg!r}")


@dataclass(frozen=True, eq=False)
class PrepResources:
    """
    Language resources. Every token set holds `.normalize_token` output, and
    the person and organization lexicons hold names as token tuples produced
    by ``L1`` preprocessing.
    """

    stopwords: FrozenSet[str] = frozenset()
    emoji_map: Dict[str, str] = field(default_factory=dict)
    insult_lexicon: FrozenSet[str] = frozenset()
    person_lexicon: FrozenSet[Tuple[str, ...]] = frozenset()
    org_lexicon: FrozenSet[Tuple[str, ...]] = frozenset()

    def __post_init__(self):
        object.__setattr__(
            self, "stopwords", frozenset(normalize_token(t) for t in self.stopwords)
        )
        object.__setattr__(
            self,
            "insult_lexicon",
            frozenset(normalize_token(t) for t in self.insult_lexicon),
        )
        for name in ("person_lexicon", "org_lexicon"):
            names = set()
            for entry in getattr(self, name):
                if isinstance(entry, str):
                    entry = tuple(_tokenize(entry, self.emoji_map))
                if entry:
                    names.add(tuple(entry))
            object.__setattr__(self, name, frozenset(names))
        object.__setattr__(self, "_emoji_re", _compile_emoji_map(self.emoji_map))


def _compile_emoji_map(emoji_map: Dict[str, str]) -> Optional["re.Pattern"]:
    if not emoji_map:
        return None
    # Longest keys first so multi-codepoint sequences win over their prefixes.
    keys = sorted(emoji_map, key=lambda k: (-len(k), k))
    return re.compile("|".join(re.escape(k) for k in keys))


def normalize_token(token: str) -> str:
    """
    Case-folds and collapses character runs, the normalization every token
    and lexicon entry goes through.

    >>> normalize_token("GOOOAL")
    'goal'
    """
    return _RUN_PATTERN.sub(r"\1", token.casefold())


def _is_kept_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "LM"


def _tokenize(text: str, emoji_map: Dict[str, str], emoji_re=None) -> List[str]:
    if emoji_map:
        if emoji_re is None:
            emoji_re = _compile_emoji_map(emoji_map)
        text = emoji_re.sub(lambda m: f" {emoji_map[m.group(0)]} ", text)
    text = _EMOJI_PATTERN.sub(" ", text)
    text = HASHTAG_PATTERN.sub(lambda m: " " + m.group(1).replace("_", " ") + " ", text)
    tokens = []
    for raw in text.casefold().split():
        token = _RUN_PATTERN.sub(r"\1", raw)
        if any(ch.isdigit() for ch in token):
            continue
        cleaned = "".join(ch if _is_kept_char(ch) else " " for ch in token)
        tokens.extend(t for t in cleaned.split() if len(t) >= MIN_TOKEN_LENGTH)
    return tokens


def preprocess(
    text: Optional[str], level: Union[PrepLevel, str], res: "PrepResources"
) -> List[str]:
    """
    Turns raw text into tokens at the given level. Total: any input, including
    `None`, gives a (possibly empty) list.

    >>> preprocess("hi", PrepLevel.L1, EMPTY_RESOURCES)
    []
    >>> res = PrepResources(stopwords={"the"}, emoji_map={"\U0001F621": "angry"})
    >>> preprocess("The vote \U0001F621\U0001F389", PrepLevel.L2, res)
    ['vote', 'angry']
    """
    if not text:
        return []
    level = PrepLevel.get(level)
    if level is PrepLevel.L3:
        text = URL_PATTERN.sub(" ", text)
        text = MENTION_PATTERN.sub(" ", text)
    tokens = _tokenize(text, res.emoji_map, getattr(res, "_emoji_re", None))
    if level in (PrepLevel.L2, PrepLevel.L3) and res.stopwords:
        tokens = [t for t in tokens if t not in res.stopwords]
    return tokens


def is_removable(text: Optional[str], level: Union[PrepLevel, str], res) -> bool:
    """
    Whether a document's preprocessed text is shorter than three characters,
    which is the document-level reading of the short-text rule.

    >>> is_removable("ok :)", PrepLevel.L1, EMPTY_RESOURCES)
    True
    """
    return len(" ".join(preprocess(text, level, res))) < MIN_TOKEN_LENGTH


EMPTY_RESOURCES = PrepResources()


def _read_lines(path: Union[str, Path]) -> List[str]:
    with open(path, encoding="utf-8") as fobj:
        return [line.rstrip("\r\n") for line in fobj]


def _read_token_set(path: Union[str, Path]) -> FrozenSet[str]:
    return frozenset(line.strip() for line in _read_lines(path) if line.strip())


def _read_emoji_map(path: Union[str, Path]) -> Dict[str, str]:
    emoji_map = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1].strip():
            raise LexiconFormatError(
                "emoji map lines must be '<emoji>\\t<text>'",
                path=str(path),
                line=lineno,
            )
        emoji_map[parts[0]] = parts[1].strip()
    return emoji_map


def load_resources(
    stopwords: Optional[Union[str, Path]] = None,
    emoji_map: Optional[Union[str, Path]] = None,
    insult: Optional[Union[str, Path]] = None,
    person: Optional[Union[str, Path]] = None,
    org: Optional[Union[str, Path]] = None,
) -> PrepResources:
    """
    Reads resource files. Token and name lexicons hold one entry per line;
    the emoji map is a two-column tab-separated file. Omitted files give empty
    resources.
    """
    res = PrepResources(
        stopwords=_read_token_set(stopwords) if stopwords else frozenset(),
        emoji_map=_read_emoji_map(emoji_map) if emoji_map else {},
        insult_lexicon=_read_token_set(insult) if insult else frozenset(),
        person_lexicon=_read_token_set(person) if person else frozenset(),
        org_lexicon=_read_token_set(org) if org else frozenset(),
    )
    _logger.info(
        "loaded resources: %d stopwords, %d emojis, %d insults, %d persons, %d orgs",
        len(res.stopwords),
        len(res.emoji_map),
        len(res.insult_lexicon),
        len(res.person_lexicon),
        len(res.org_lexicon),
    )
    return res
