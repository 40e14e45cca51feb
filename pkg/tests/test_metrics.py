from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hatewce.errors import InputError
from hatewce.metrics import compute_metrics, confusion, macro_f1


def brute_force_macro_f1(truth, pred, k):
    """Per-sample TP/FP/FN tallies, exact fractions, 0/0 -> 0."""
    f1s = []
    for c in range(k):
        tp = fp = fn = 0
        for t, p in zip(truth, pred):
            if p == c and t == c:
                tp += 1
            elif p == c:
                fp += 1
            elif t == c:
                fn += 1
        prec = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        rec = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else Fraction(0))
    return f1s, float(sum(f1s) / k)


class TestConfusion:
    def test_single(self):
        assert confusion([0], [0], 2).tolist() == [[1, 0], [0, 0]]

    def test_rows_are_truth(self):
        assert confusion([0, 1], [0, 0], 2).tolist() == [[1, 0], [1, 0]]

    def test_row_sums(self):
        rng = np.random.default_rng(0)
        t = rng.integers(0, 4, 40)
        p = rng.integers(0, 4, 40)
        np.testing.assert_array_equal(confusion(t, p, 4).sum(axis=1), np.bincount(t, minlength=4))

    @pytest.mark.parametrize("truth, pred", [([0, 1], [0]), ([0, 2], [0, 1]), ([0], [-1]), ([], [])])
    def test_bad_inputs(self, truth, pred):
        with pytest.raises(InputError):
            confusion(truth, pred, 2)


class TestMacroF1:
    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_perfect(self, k):
        labels = list(range(k)) * 3
        assert compute_metrics(labels, labels, k).macro_f1 == 1.0

    def test_half_right_fixture(self):
        m = compute_metrics([0, 1], [0, 0], 2)
        a, b = m.per_class
        assert (a.precision, a.recall, a.f1) == (0.5, 1.0, 2 / 3)
        assert b.f1 == 0.0
        assert m.macro_f1 == 1 / 3

    def test_absent_class_counts_as_zero(self):
        m = compute_metrics([0, 1, 1], [0, 1, 1], 3)
        assert m.per_class[2].f1 == 0.0
        assert m.macro_f1 == pytest.approx(2 / 3)

    def test_needs_two_classes(self):
        with pytest.raises(InputError):
            macro_f1(np.array([[3]]))

    def test_brute_force_agreement(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            k = int(rng.choice([2, 4]))
            n = int(rng.integers(1, 51))
            t, p = rng.integers(0, k, n), rng.integers(0, k, n)
            per_class, macro = macro_f1(confusion(t, p, k))
            ref_per_class, ref_macro = brute_force_macro_f1(t.tolist(), p.tolist(), k)
            assert macro == ref_macro
            assert [s.f1 for s in per_class] == [float(f) for f in ref_per_class]

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=50),
           st.permutations(range(4)))
    def test_range_and_relabeling(self, pairs, perm):
        t = [a for a, _ in pairs]
        p = [b for _, b in pairs]
        m = compute_metrics(t, p, 4)
        assert 0.0 <= m.macro_f1 <= 1.0
        assert m.confusion.sum() == len(pairs)
        diagonal = not (m.confusion - np.diag(np.diag(m.confusion))).any()
        all_present = all(m.confusion[c, c] > 0 for c in range(4))
        assert (m.macro_f1 == 1.0) == (diagonal and all_present)
        mp = compute_metrics([perm[a] for a in t], [perm[b] for b in p], 4)
        assert mp.macro_f1 == m.macro_f1
        for c in range(4):
            assert mp.per_class[perm[c]] == m.per_class[c]

    def test_report_dict(self):
        d = compute_metrics([0, 1, 1], [0, 1, 0], 2).to_dict(["HOF", "NOT"])
        assert set(d) == {"n", "macro_f1", "per_class", "confusion"}
        assert d["per_class"][0]["class"] == "HOF"
        assert d["confusion"] == [[1, 0], [1, 1]]
