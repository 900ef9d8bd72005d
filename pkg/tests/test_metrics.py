import csv
import random

import numpy as np
import pytest

import oracles
from flowlab.errors import EmptyMatrix, FlowlabError, LengthMismatch, UnknownLabel
from flowlab.metrics import (
    compare,
    confusion,
    load_report,
    render_comparison_text,
    render_report_text,
    report_from_dict,
    report_to_dict,
    save_report,
    score,
    write_comparison_csv,
)


def test_confusion_hand_case():
    cm = confusion([0, 0, 1, 1], [0, 1, 1, 1])
    assert cm.classes == (0, 1)
    assert cm.counts.tolist() == [[1, 1], [0, 2]]  # rows are true classes
    assert cm.total == 4


def test_confusion_explicit_class_list():
    cm = confusion([0, 0], [0, 0], classes=[0, 1, 2])
    assert cm.counts.shape == (3, 3)
    assert cm.counts.sum() == 2


def test_confusion_guards():
    with pytest.raises(LengthMismatch):
        confusion([0, 1], [0])
    with pytest.raises(UnknownLabel):
        confusion([0, 3], [0, 0], classes=[0, 1])  # 3 not in the class list


def test_scoring_empty_matrix_rejected():
    with pytest.raises(EmptyMatrix):
        score(confusion([], []))


def test_score_two_thirds_case():
    # class 1: TP=2 FP=1 FN=1 so precision = recall = f1 = 2/3
    cm = confusion([0, 1, 1, 1, 0, 0], [1, 1, 1, 0, 0, 0])
    rep = score(cm)
    s = rep.per_class[1]
    assert s.precision == pytest.approx(2 / 3, abs=1e-15)
    assert s.recall == pytest.approx(2 / 3, abs=1e-15)
    assert s.f1 == pytest.approx(2 / 3, abs=1e-15)
    assert s.support == 3


def test_zero_division_cells_are_zero_and_flagged():
    # class 2 never appears in truth or prediction
    cm = confusion([0, 1], [0, 1], classes=[0, 1, 2])
    rep = score(cm)
    s = rep.per_class[2]
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)
    assert s.support == 0
    flagged = set(rep.zero_division)
    assert (2, "precision") in flagged
    assert (2, "recall") in flagged
    assert (2, "f1") in flagged


def test_weighted_recall_equals_accuracy():
    rnd = random.Random(0)
    for _ in range(200):
        n = rnd.randrange(1, 60)
        k = rnd.randrange(2, 5)
        y_true = [rnd.randrange(k) for _ in range(n)]
        y_pred = [rnd.randrange(k) for _ in range(n)]
        rep = score(confusion(y_true, y_pred))
        assert abs(rep.weighted.recall - rep.accuracy) < 1e-12


def test_scores_match_counting_oracle():
    rnd = random.Random(1)
    for _ in range(300):
        n = rnd.randrange(1, 50)
        k = rnd.randrange(1, 5)
        y_true = [rnd.randrange(k) for _ in range(n)]
        y_pred = [rnd.randrange(k) for _ in range(n)]
        rep = score(confusion(y_true, y_pred))
        classes = sorted(set(y_true) | set(y_pred))
        assert abs(rep.accuracy - oracles.accuracy(y_true, y_pred)) < 1e-12
        for c in classes:
            p, r, f1, support = oracles.class_scores(y_true, y_pred, c)
            s = rep.per_class[c]
            assert abs(s.precision - p) < 1e-12
            assert abs(s.recall - r) < 1e-12
            assert abs(s.f1 - f1) < 1e-12
            assert s.support == support
        macro, weighted = oracles.averages(y_true, y_pred, classes)
        assert abs(rep.macro.precision - macro[0]) < 1e-12
        assert abs(rep.macro.f1 - macro[2]) < 1e-12
        assert abs(rep.weighted.precision - weighted[0]) < 1e-12
        assert abs(rep.weighted.f1 - weighted[2]) < 1e-12


def test_permutation_invariance():
    y_true = [0, 1, 0, 2, 1, 2, 0]
    y_pred = [0, 1, 1, 2, 0, 2, 0]
    rep = score(confusion(y_true, y_pred))
    order = [3, 0, 6, 2, 5, 1, 4]
    rep2 = score(confusion([y_true[i] for i in order], [y_pred[i] for i in order]))
    assert rep.accuracy == rep2.accuracy
    assert rep.per_class == rep2.per_class


# -- comparisons -------------------------------------------------------------


def reports():
    a = score(confusion([0, 1, 1, 1], [0, 1, 1, 1]), model="Alpha")
    b = score(confusion([0, 1, 1, 1], [1, 0, 1, 1]), model="Beta")
    c = score(confusion([0, 1, 1, 1], [0, 0, 1, 1]), model="Gamma")
    return a, b, c


def test_compare_sorts_by_accuracy_then_name():
    table = compare(reports())
    assert [r.model for r in table.rows] == ["Alpha", "Gamma", "Beta"]
    accs = [r.accuracy for r in table.rows]
    assert accs == sorted(accs, reverse=True)


def test_compare_name_breaks_exact_ties():
    x = score(confusion([0, 1], [0, 1]), model="Zed")
    y = score(confusion([0, 1], [0, 1]), model="Ant")
    assert [r.model for r in compare([x, y]).rows] == ["Ant", "Zed"]


def test_compare_needs_input():
    with pytest.raises(FlowlabError):
        compare([])


def test_render_comparison_layout():
    text = render_comparison_text(compare(reports()))
    lines = text.splitlines()
    assert lines[0].split() == ["Model", "Accuracy", "Precision", "Recall", "F1-score"]
    assert set(lines[1]) <= {"-", " "}
    assert lines[2].startswith("Alpha")
    assert "1.000000000000" in lines[2]  # accuracy carries 12 decimals


def test_comparison_csv_round_trips_floats(tmp_path):
    table = compare(reports())
    path = tmp_path / "cmp.csv"
    write_comparison_csv(table, path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["model", "accuracy", "precision", "recall", "f1_score"]
    for row, want in zip(rows[1:], table.rows):
        assert float(row[1]) == want.accuracy  # repr() round-trip, no loss


# -- report serialization ----------------------------------------------------


def test_report_dict_round_trip():
    rep = score(confusion([0, 1, 1, 2], [0, 1, 2, 2], classes=[0, 1, 2]), model="Demo")
    doc = report_to_dict(rep)
    again = report_from_dict(doc)
    assert again.model == rep.model
    assert again.accuracy == rep.accuracy
    assert again.per_class == rep.per_class
    assert again.macro == rep.macro
    assert again.weighted == rep.weighted
    assert again.zero_division == rep.zero_division
    assert np.array_equal(again.confusion.counts, rep.confusion.counts)


def test_report_file_round_trip(tmp_path):
    rep = score(confusion([0, 1, 1, 1], [0, 1, 0, 1]), model="Disk")
    path = tmp_path / "report.json"
    save_report(rep, path)
    again = load_report(path)
    assert again.model == "Disk"
    assert again.accuracy == rep.accuracy


def test_render_report_text_mentions_everything():
    rep = score(confusion([0, 1, 1, 1], [0, 1, 0, 1]), model="Plain")
    text = render_report_text(rep)
    assert "Plain" in text
    assert "accuracy" in text.lower()
    assert "macro" in text.lower()
    assert "weighted" in text.lower()
