import itertools
import random

import pytest

from genre_grid.errors import DataError
from genre_grid.evaluation import confusion_matrix, evaluate


def metrics_oracle(y_true, y_pred, label_set):
    """Definition-level recomputation with plain counting, no matrix reuse."""
    per_class = {}
    for label in label_set:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == label and p == label)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != label and p == label)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == label and p != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = (precision, recall, f1, tp + fn)
    n = len(y_true)
    macro = tuple(
        sum(per_class[l][k] for l in label_set) / len(label_set) for k in range(3)
    )
    weighted = tuple(
        sum(per_class[l][k] * per_class[l][3] for l in label_set) / n for k in range(3)
    )
    accuracy = sum(1 for t, p in zip(y_true, y_pred) if t == p) / n
    return per_class, accuracy, macro, weighted


class TestConfusionMatrix:
    def test_perfect_is_diagonal(self):
        y = ["a", "b", "c", "a"]
        m = confusion_matrix(y, y, ("a", "b", "c"))
        assert m == [[2, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_degenerate_predictor_single_column(self):
        m = confusion_matrix(["a", "b", "c"], ["b", "b", "b"], ("a", "b", "c"))
        assert m == [[0, 1, 0], [0, 1, 0], [0, 1, 0]]

    def test_direct_count(self):
        m = confusion_matrix(["a", "a", "b", "b"], ["a", "b", "b", "b"], ("a", "b"))
        assert m == [[1, 1], [0, 2]]

    def test_unknown_label(self):
        with pytest.raises(DataError, match="unknown true label"):
            confusion_matrix(["x"], ["a"], ("a", "b"))
        with pytest.raises(DataError, match="unknown predicted label"):
            confusion_matrix(["a"], ["x"], ("a", "b"))

    def test_length_mismatch(self):
        with pytest.raises(DataError, match="length mismatch"):
            confusion_matrix(["a"], ["a", "b"], ("a", "b"))


class TestEvaluate:
    def test_binary_fixture(self):
        # confusion [[2,0],[1,1]]
        y_true = ["a", "a", "b", "b"]
        y_pred = ["a", "a", "a", "b"]
        report = evaluate(y_true, y_pred, ("a", "b"))
        assert report.confusion == [[2, 0], [1, 1]]
        assert report.per_class["a"].precision == pytest.approx(2 / 3)
        assert report.per_class["a"].recall == pytest.approx(1.0)
        assert report.per_class["a"].f1 == pytest.approx(0.8)
        assert report.per_class["b"].precision == pytest.approx(1.0)
        assert report.per_class["b"].recall == pytest.approx(0.5)
        assert report.per_class["b"].f1 == pytest.approx(2 / 3)
        assert report.macro_f1 == pytest.approx(11 / 15, abs=1e-12)  # 0.7333...
        assert report.accuracy == pytest.approx(0.75)

    def test_perfect_three_class(self):
        y = ["a", "b", "c", "a", "b", "c"]
        report = evaluate(y, y, ("a", "b", "c"))
        assert report.accuracy == 1.0
        assert report.macro_avg == (1.0, 1.0, 1.0)
        assert report.weighted_avg == (1.0, 1.0, 1.0)
        for m in report.per_class.values():
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_zero_division_flagged(self):
        report = evaluate(["a", "a"], ["a", "a"], ("a", "b"))
        assert report.per_class["b"].precision == 0.0
        assert "precision/b" in report.zero_division_flags
        assert "recall/b" in report.zero_division_flags

    def test_supports_sum_to_n_and_rows_match(self):
        rng = random.Random(3)
        labels = ("x", "y", "z")
        y_true = [rng.choice(labels) for _ in range(40)]
        y_pred = [rng.choice(labels) for _ in range(40)]
        report = evaluate(y_true, y_pred, labels)
        assert sum(m.support for m in report.per_class.values()) == report.n
        for i, label in enumerate(labels):
            assert sum(report.confusion[i]) == report.per_class[label].support

    def test_macro_invariant_under_relabeling(self):
        rng = random.Random(11)
        labels = ("a", "b", "c")
        y_true = [rng.choice(labels) for _ in range(30)]
        y_pred = [rng.choice(labels) for _ in range(30)]
        base = evaluate(y_true, y_pred, labels)
        for perm in itertools.permutations(labels):
            mapping = dict(zip(labels, perm))
            report = evaluate(
                [mapping[t] for t in y_true],
                [mapping[p] for p in y_pred],
                labels,
            )
            assert report.macro_avg == pytest.approx(base.macro_avg, abs=1e-12)
            assert report.accuracy == pytest.approx(base.accuracy, abs=1e-12)

    def test_weighted_equals_macro_when_balanced(self):
        y_true = ["a", "a", "b", "b"]
        y_pred = ["a", "b", "b", "a"]
        report = evaluate(y_true, y_pred, ("a", "b"))
        assert report.weighted_avg == pytest.approx(report.macro_avg, abs=1e-12)

    def test_identity_accuracy_one(self):
        rng = random.Random(17)
        y = [rng.choice("ab") for _ in range(25)]
        assert evaluate(y, y, ("a", "b")).accuracy == 1.0

    def test_randomized_oracle_equivalence(self):
        rng = random.Random(23)
        for _ in range(50):
            k = rng.randint(2, 4)
            labels = tuple(f"c{i}" for i in range(k))
            n = rng.randint(1, 50)
            y_true = [rng.choice(labels) for _ in range(n)]
            y_pred = [rng.choice(labels) for _ in range(n)]
            report = evaluate(y_true, y_pred, labels)
            per_class, accuracy, macro, weighted = metrics_oracle(y_true, y_pred, labels)
            assert report.accuracy == pytest.approx(accuracy, abs=1e-12)
            assert report.macro_avg == pytest.approx(macro, abs=1e-12)
            assert report.weighted_avg == pytest.approx(weighted, abs=1e-12)
            for label in labels:
                m = report.per_class[label]
                assert (m.precision, m.recall, m.f1, m.support) == pytest.approx(
                    per_class[label], abs=1e-12
                )

    def test_text_rendering_contains_rows(self):
        report = evaluate(["a", "b"], ["a", "b"], ("a", "b"))
        text = report.to_text()
        assert "precision" in text and "macro avg" in text and "accuracy" in text

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            evaluate([], [], ("a",))
