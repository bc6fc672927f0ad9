"""
Checks the metric functions against a direct per-element count.
"""

import numpy as np
import pytest

from axiscascade.core.errors import ValidationError
from axiscascade.metrics import Confusion, EvalReport, confusion, evaluate


def oracle(y_true, y_pred):
    """Per-class precision, recall, F1 and support by counting."""
    out = {}
    for c in (0, 1):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        predicted = sum(1 for p in y_pred if p == c)
        actual = sum(1 for t in y_true if t == c)
        precision = tp / predicted if predicted else 0.0
        recall = tp / actual if actual else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        out[c] = (precision, recall, f1, actual)
    return out


def test_against_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(1000):
        # Vary the class balance, including one-sided vectors.
        p_true, p_pred = rng.random(2) ** (1 + trial % 3)
        y_true = (rng.random(200) < p_true).astype(int).tolist()
        y_pred = (rng.random(200) < p_pred).astype(int).tolist()
        report = evaluate(y_true, y_pred)
        expected = oracle(y_true, y_pred)
        for c, scores in ((1, report.class_1), (0, report.class_0)):
            precision, recall, f1, support = expected[c]
            assert scores.precision == pytest.approx(precision, abs=1e-12)
            assert scores.recall == pytest.approx(recall, abs=1e-12)
            assert scores.f1 == pytest.approx(f1, abs=1e-12)
            assert scores.support == support
        assert report.f1_macro == pytest.approx(
            (expected[0][2] + expected[1][2]) / 2, abs=1e-12
        )
        weighted = (expected[0][2] * expected[0][3] + expected[1][2] * expected[1][3])
        assert report.f1_weighted == pytest.approx(weighted / 200, abs=1e-12)


def test_zero_denominators():
    report = evaluate([0, 0, 0], [0, 0, 0])
    assert (report.class_1.precision, report.class_1.recall, report.class_1.f1) == (
        0.0,
        0.0,
        0.0,
    )
    assert report.class_0.f1 == 1.0
    assert report.f1_macro == 0.5
    assert report.f1_weighted == 1.0


def test_report_rebuilds_from_counts():
    c = confusion([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert c == Confusion(tp=2, fp=1, fn=1, tn=1)
    assert EvalReport.from_confusion(c) == evaluate([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])


def test_report_rows():
    report = evaluate([1, 0], [1, 1], provenance={"method": "axis(t=0)"})
    row = report.to_row()
    assert row["precision_1"] == 0.5
    assert row["support_0"] == 1
    assert (row["tp"], row["fp"], row["fn"], row["tn"]) == (1, 1, 0, 0)
    assert report.to_dict()["provenance"] == {"method": "axis(t=0)"}


@pytest.mark.parametrize(
    "y_true,y_pred",
    (
        ([1, 0], [1]),
        ([], []),
        ([1, 2], [1, 0]),
        ([[1, 0]], [[1, 0]]),
    ),
)
def test_bad_inputs(y_true, y_pred):
    with pytest.raises(ValidationError):
        evaluate(y_true, y_pred)


def test_bad_counts():
    with pytest.raises(ValidationError):
        Confusion(tp=-1, fp=0, fn=0, tn=0)
