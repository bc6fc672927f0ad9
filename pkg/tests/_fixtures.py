"""
Small synthetic datasets shared by several test modules.
"""

import json
from pathlib import Path

import numpy as np

from axiscascade.data.dataset import Dataset, Document, Meta
from axiscascade.data.synth import SynthSpec, synth_generate


def separable(n=400, dim=2, seed=0, margin=1.0):
    """Two Gaussian blobs on either side of ``x0 + x1 = 0``, with a gap."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, dim))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    shift = np.where(y == 1, margin, -margin)
    X[:, 0] += shift
    X[:, 1] += shift
    return X, y


def small_synth(seed=0, n_clean=60, n_overlap=30, n_neg=50, dim=4):
    spec = SynthSpec(
        dim=dim,
        n_pos_clean=n_clean,
        n_pos_overlap=n_overlap,
        n_neg=n_neg,
        mean_clean=(-2.0, 1.5) + (0.0,) * (dim - 2),
        mean_overlap=(2.0, -1.0) + (0.0,) * (dim - 2),
        mean_neg=(2.0, 1.5) + (0.0,) * (dim - 2),
        scale_clean=0.5,
        scale_overlap=0.5,
        scale_neg=0.5,
    )
    return synth_generate(spec, seed)


WORDS = {
    "fraud": (1.0, 0.0, 0.2),
    "liar": (0.9, 0.1, 0.0),
    "shame": (0.8, 0.3, 0.1),
    "vote": (0.0, 1.0, 0.1),
    "hope": (0.1, 0.9, 0.0),
    "future": (0.2, 0.8, 0.3),
    "debate": (0.5, 0.5, 0.5),
}

NEGATIVE_TEXTS = [
    "fraud liar shame",
    "liar fraud again",
    "shame on the liar",
    "total fraud and shame",
    "liar liar fraud",
    "shame shame debate",
]
POSITIVE_TEXTS = [
    "vote for hope",
    "hope and future",
    "our future vote",
    "vote vote hope",
    "future debate hope",
    "hope for the future",
]


def write_word_vectors(path: Path) -> Path:
    lines = [" ".join([w] + [str(v) for v in vec]) for w, vec in WORDS.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def text_corpus(copies=5):
    """A labeled, text-only corpus whose words all appear in `.WORDS`."""
    docs = []
    for c in range(copies):
        for i, text in enumerate(NEGATIVE_TEXTS):
            docs.append(
                Document(
                    f"n{c}-{i}",
                    text=f"{text} @someone http://t.co/x",
                    label=1,
                    meta=Meta(retweet_count=i, like_count=c, follower_count=10 + i),
                )
            )
        for i, text in enumerate(POSITIVE_TEXTS):
            docs.append(
                Document(
                    f"p{c}-{i}",
                    text=f"{text} #iran",
                    label=0,
                    meta=Meta(retweet_count=c, like_count=i, follower_count=20 + c),
                )
            )
    return Dataset(docs)


def write_jsonl(path: Path, ds: Dataset) -> Path:
    with open(path, "w", encoding="utf-8") as fobj:
        for doc in ds:
            fobj.write(json.dumps(doc.as_record()) + "\n")
    return path


def overlap_corpus():
    """`.text_corpus` plus positives worded like the negatives."""
    docs = list(text_corpus())
    docs += [
        Document(f"o{c}", text="liar shame fraud hope #iran", label=0)
        for c in range(5)
    ]
    return Dataset(docs)


RUN_CONFIG = {
    "dataset": "corpus.jsonl",
    "word_vectors": "words.vec",
    "prep_level": "L3",
    "features": {"enabled": False},
    "split": {"ratio": 0.8, "seed": 13},
    "method": {"axis": {"t": 0}},
    "stage_a": {"kind": "lr"},
    "stage_b": {"kind": "lr"},
    "output_dir": "out",
}


def write_workspace(path: Path) -> Path:
    """The overlap corpus, word vectors and ``run.json`` under ``path``."""
    write_jsonl(path / "corpus.jsonl", overlap_corpus())
    write_word_vectors(path / "words.vec")
    (path / "run.json").write_text(json.dumps(RUN_CONFIG), encoding="utf-8")
    return path
