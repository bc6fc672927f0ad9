"""
Engineered feature families and the fitted feature pipeline.
"""

import numpy as np
import pytest

from axiscascade.core.errors import FeatureSchemaError, ValidationError
from axiscascade.data.dataset import Dataset, Document, Meta
from axiscascade.text.features import (
    FeatureConfig,
    FeaturePipeline,
    build_ngram_vocab,
    extract_features,
    feature_names,
)
from axiscascade.text.prep import EMPTY_RESOURCES, PrepLevel, PrepResources
from axiscascade.embed.encode import tokenize_dataset

ELECTION = 1623974400  # 2021-06-18T00:00:00Z
DAY = 86400


def _time_feats(published, created=None, **config):
    doc = Document("a", meta=Meta(published_at=published, account_created_at=created))
    return extract_features(
        doc, [], EMPTY_RESOURCES, None, FeatureConfig(families=("time",), **config)
    )


def test_families_are_canonically_ordered():
    assert FeatureConfig(families=("time", "text")).families == ("text", "time")
    with pytest.raises(ValidationError):
        FeatureConfig(families=("text", "audio"))
    with pytest.raises(ValidationError):
        FeatureConfig(election_date="18/06/2021")


def test_text_family():
    res = PrepResources(
        insult_lexicon={"liar"},
        person_lexicon={"ali raisi"},
        org_lexicon={"guardian council"},
    )
    doc = Document(
        "a",
        text="@x liar ali raisi and the guardian council http://t.co/1 #vote #no",
        meta=Meta(retweet_count=4, like_count=9),
        features={"sentiment": -0.5},
    )
    tokens = ["liar", "ali", "raisi", "and", "the", "guardian", "council", "liar"]
    feats = extract_features(
        doc, tokens, res, None, FeatureConfig(families=("text",))
    )
    assert feats == {
        "retweet_count": 4.0,
        "like_count": 9.0,
        "mentions_count": 1.0,
        "links_count": 1.0,
        "hashtags_count": 2.0,
        "insult_count": 2.0,
        "person_names_count": 1.0,
        "organize_names_count": 1.0,
        "sentiment": -0.5,
    }


def test_user_family_defaults_missing_values_to_zero():
    doc = Document("a", meta=Meta(follower_count=7, is_candidate=True))
    feats = extract_features(
        doc, [], EMPTY_RESOURCES, None, FeatureConfig(families=("user",))
    )
    assert feats == {
        "follower_count": 7.0,
        "following_count": 0.0,
        "tweet_count": 0.0,
        "is_candidate": 1.0,
    }


def test_time_family():
    published = ELECTION - 15 * DAY + 13 * 3600
    feats = _time_feats(published, created=published - 100 * DAY)
    assert feats["account_age_days"] == pytest.approx(100.0)
    assert feats["tweet_age_days"] == pytest.approx(15 - 13 / 24)
    assert [feats[f"quarter_{q}"] for q in range(4)] == [0.0, 0.0, 1.0, 0.0]
    hot = [name for name, v in feats.items() if name.startswith("days_before")]
    assert hot == [f"days_before_w{w}" for w in range(7)]
    assert feats["days_before_w1"] == 1.0
    assert sum(feats[name] for name in hot) == 1.0


@pytest.mark.parametrize(
    "published,window",
    ((ELECTION - 200 * DAY, 6), (ELECTION + 3 * DAY, 0), (ELECTION - DAY, 0)),
)
def test_time_windows_are_clamped(published, window):
    feats = _time_feats(published)
    assert feats[f"days_before_w{window}"] == 1.0


def test_time_family_without_timestamps_is_all_zero():
    feats = _time_feats(None)
    assert set(feats.values()) == {0.0}


def test_ngram_vocab_top_and_exclusive():
    docs = [
        Document("a", text="fraud vote fraud", label=1),
        Document("b", text="fraud again", label=1),
        Document("c", text="vote again hope", label=0),
    ]
    vocab = build_ngram_vocab(Dataset(docs), 1)
    assert vocab.top[1] == {
        ("fraud",),
        ("fraud", "again"),
        ("fraud", "vote", "fraud"),
    }
    assert vocab.exclusive[0] == {
        ("hope",),
        ("again", "hope"),
        ("vote", "again", "hope"),
    }
    assert vocab.ngrams[:3] == (("again",), ("fraud",), ("hope",))
    assert vocab.feature_names()[-2:] == ["exclusive0_hits", "exclusive1_hits"]


def test_ngram_vocab_needs_labels_and_records():
    with pytest.raises(ValidationError):
        build_ngram_vocab(Dataset(), 3)
    with pytest.raises(ValidationError):
        build_ngram_vocab(Dataset([Document("a", text="x")]), 3)


def test_pipeline_columns_are_frozen_at_fit():
    train = Dataset(
        [
            Document("a", text="fraud liar", label=1),
            Document("b", text="vote hope", label=0),
        ]
    )
    config = FeatureConfig(families=("text", "metatext"), k_per_class=2)
    tokens = tokenize_dataset(train, PrepLevel.L3, EMPTY_RESOURCES)
    pipeline = FeaturePipeline(EMPTY_RESOURCES, config)
    with pytest.raises(FeatureSchemaError):
        pipeline.transform(train, tokens)
    pipeline.fit(train, tokens)
    assert list(pipeline.names) == feature_names(config, pipeline.vocab)
    test = Dataset([Document("z", text="fraud fraud unknown")])
    rows = pipeline.transform(
        test, tokenize_dataset(test, PrepLevel.L3, EMPTY_RESOURCES)
    )
    assert rows.shape == (1, len(pipeline.names))
    assert rows[0, pipeline.names.index("ng:fraud")] == 2.0
    assert rows[0, pipeline.names.index("exclusive1_hits")] == 2.0
    assert np.all(np.isfinite(rows))
    other = build_ngram_vocab(
        Dataset([Document("q", text="one two three four", label=1)]), 5
    )
    with pytest.raises(FeatureSchemaError):
        pipeline.check_vocab(other)
