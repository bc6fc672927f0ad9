"""
Preprocessing levels and resource loading.
"""

import pytest

from axiscascade.core.errors import LexiconFormatError, ValidationError
from axiscascade.text.prep import (
    EMPTY_RESOURCES,
    PrepLevel,
    PrepResources,
    is_removable,
    load_resources,
    preprocess,
)

TEXT = "The fraud at www.example.com by @rival!!! #stop_the_fraud 2021 nooooo"


@pytest.mark.parametrize(
    "level,expected",
    (
        (
            PrepLevel.L1,
            ["the", "fraud", "example", "com", "rival", "stop", "the", "fraud"],
        ),
        (PrepLevel.L2, ["fraud", "example", "com", "rival", "stop", "fraud"]),
        (PrepLevel.L3, ["fraud", "stop", "fraud"]),
    ),
)
def test_levels_extend_each_other(level, expected):
    res = PrepResources(stopwords={"the"})
    assert preprocess(TEXT, level, res) == expected


def test_total_on_empty_input():
    assert preprocess(None, PrepLevel.L3, EMPTY_RESOURCES) == []
    assert preprocess("", "L2", EMPTY_RESOURCES) == []
    assert preprocess("!! ?? 42", 1, EMPTY_RESOURCES) == []


def test_emoji_mapping_and_unmapped_emoji():
    res = PrepResources(emoji_map={"\U0001F44E": "dislike"})
    tokens = preprocess("bad \U0001F44E\U0001F600 idea", PrepLevel.L1, res)
    assert tokens == ["bad", "dislike", "idea"]


def test_stopwords_are_normalized():
    res = PrepResources(stopwords={"THEEE"})
    assert preprocess("the vote", PrepLevel.L2, res) == ["vote"]


def test_persian_letters_are_kept():
    assert preprocess("تقلب در انتخابات", PrepLevel.L1, EMPTY_RESOURCES) == [
        "تقلب",
        "انتخابات",
    ]


def test_is_removable():
    assert is_removable("@a @b http://t.co/z", PrepLevel.L3, EMPTY_RESOURCES)
    assert not is_removable("@a @b http://t.co/z", PrepLevel.L1, EMPTY_RESOURCES)
    assert not is_removable("vote", PrepLevel.L3, EMPTY_RESOURCES)


def test_unknown_level():
    with pytest.raises(ValidationError):
        PrepLevel.get("L4")


def test_load_resources(tmp_path):
    (tmp_path / "stop.txt").write_text("the\nand\n\n", encoding="utf-8")
    (tmp_path / "emoji.tsv").write_text("\U0001F621\tangry\n", encoding="utf-8")
    (tmp_path / "person.txt").write_text("Ali Raisi\n", encoding="utf-8")
    res = load_resources(
        stopwords=tmp_path / "stop.txt",
        emoji_map=tmp_path / "emoji.tsv",
        person=tmp_path / "person.txt",
    )
    assert res.stopwords == {"the", "and"}
    assert res.emoji_map == {"\U0001F621": "angry"}
    assert res.person_lexicon == {("ali", "raisi")}
    assert res.insult_lexicon == frozenset()


def test_bad_emoji_map_names_line(tmp_path):
    path = tmp_path / "emoji.tsv"
    path.write_text("\U0001F621\tangry\nno tab here\n", encoding="utf-8")
    with pytest.raises(LexiconFormatError) as info:
        load_resources(emoji_map=path)
    assert info.value.line == 2
