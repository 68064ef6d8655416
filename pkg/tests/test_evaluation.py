import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tweetpolarity.evaluation import (AbsentClassWarning, ConfusionMatrix, accuracy,
                                      baseline_report, confusion_matrix, evaluate, f1_pn,
                                      format_table, macro_recall)

NEG, NEU, POS = "negative", "neutral", "positive"
matrices = arrays(np.int64, (3, 3), elements=st.integers(0, 50)).filter(lambda a: a.sum() > 0)


class TestConfusion:
    def test_diagonal(self):
        assert confusion_matrix([POS], [POS]).counts[2, 2] == 1

    def test_tally(self):
        m = confusion_matrix([POS, NEG], [NEG, NEG]).counts
        assert m[2, 0] == 1 and m[0, 0] == 1 and m.sum() == 2

    def test_empty(self):
        assert confusion_matrix([], []).counts.sum() == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion_matrix([POS], [])

    def test_unknown_label(self):
        with pytest.raises(ValueError, match="unknown label"):
            confusion_matrix(["happy"], [POS])


class TestMacroRecall:
    def test_perfect(self):
        assert macro_recall(confusion_matrix([NEG, NEU, POS], [NEG, NEU, POS])) == 1.0

    def test_all_neutral(self):
        assert macro_recall(confusion_matrix([NEG, NEU, POS], [NEU] * 3)) == pytest.approx(1 / 3, abs=1e-15)

    def test_mean_of_recalls(self):
        # recalls: negative 1, neutral 0.5, positive 0
        m = confusion_matrix([NEG, NEU, NEU, POS], [NEG, NEU, POS, NEG])
        assert macro_recall(m) == 0.5

    def test_absent_class_warns(self):
        with pytest.warns(AbsentClassWarning):
            assert macro_recall(confusion_matrix([POS, NEG], [POS, NEG])) == pytest.approx(2 / 3)

    @given(matrices, st.integers(1, 20))
    def test_scale_invariant(self, counts, k):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AbsentClassWarning)
            a = macro_recall(ConfusionMatrix(counts))
            b = macro_recall(ConfusionMatrix(counts * k))
        assert a == pytest.approx(b, abs=1e-12)


class TestF1:
    def test_all_neutral(self):
        assert f1_pn(confusion_matrix([NEG, NEU, POS], [NEU] * 3)) == 0.0

    def test_perfect(self):
        assert f1_pn(confusion_matrix([NEG, NEU, POS], [NEG, NEU, POS])) == 1.0

    def test_hand_computed(self):
        # positive: P=0.5 R=1; negative: P=1 R=0.5 -> both F1 = 2/3
        m = confusion_matrix([POS, NEG, NEG], [POS, NEG, POS])
        assert f1_pn(m) == pytest.approx(2 / 3, abs=1e-15)

    @given(matrices)
    def test_bounds_and_perfect_iff(self, counts):
        m = ConfusionMatrix(counts)
        v = f1_pn(m)
        assert 0.0 <= v <= 1.0
        clean = all(counts[i, j] == 0 for i in range(3) for j in range(3)
                    if i != j and (i in (0, 2) or j in (0, 2)))
        has_pn = counts[0, 0] > 0 and counts[2, 2] > 0
        assert (v == pytest.approx(1.0)) == (clean and has_pn)


class TestAccuracy:
    def test_perfect(self):
        assert accuracy(confusion_matrix([POS, NEG], [POS, NEG])) == 1.0

    def test_quarter(self):
        assert accuracy(confusion_matrix([POS] * 4, [POS, NEG, NEG, NEU])) == 0.25

    def test_empty(self):
        with pytest.raises(ValueError):
            accuracy(confusion_matrix([], []))

    @given(matrices.filter(lambda a: (a.sum(axis=1) > 0).all()))
    def test_weighted_recall_identity(self, counts):
        m = ConfusionMatrix(counts)
        weights = counts.sum(axis=1) / counts.sum()
        recalls = [m.recall(c) for c in (NEG, NEU, POS)]
        assert accuracy(m) == pytest.approx(float(weights @ recalls), abs=1e-12)


class TestBaselines:
    GOLD = [POS] * 5 + [NEG] * 3 + [NEU] * 7

    def test_rho_third_each(self):
        for rep in baseline_report(self.GOLD):
            assert abs(rep.rho - 1 / 3) <= 1e-12

    def test_neutral_baseline_f1(self):
        assert baseline_report(self.GOLD)[2].f1_pn == 0.0

    def test_accuracy_is_class_share(self):
        pos, neg, neu = baseline_report(self.GOLD)
        assert (pos.acc, neg.acc, neu.acc) == (5 / 15, 3 / 15, 7 / 15)

    def test_empty(self):
        with pytest.raises(ValueError):
            baseline_report([])


def test_report_fields_and_table():
    rep = evaluate([NEG, NEU, POS, POS], [NEG, NEU, POS, NEU])
    d = rep.to_dict()
    assert set(d) == {"rho", "f1_pn", "acc", "per_class", "n"} and d["n"] == 4
    assert d["per_class"][POS] == {"recall": 0.5, "precision": 1.0, "f1": pytest.approx(2 / 3), "support": 2}
    table = format_table([("system", rep)])
    assert "system" in table and "0.833" in table and "0.750" in table
