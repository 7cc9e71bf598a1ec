import numpy as np
import pytest

from spectral_bench.metrics import ConfusionMatrix, confusion, diagnosis_metrics

# shared fixture: 10 predictions with TP=4, FN=1, TN=3, FP=2 (class 1 positive)
FIXTURE_LABELS = np.array([1, 1, 1, 1, 1, 0, 0, 0, 0, 0])
FIXTURE_PREDS = np.array([1, 1, 1, 1, 0, 0, 0, 0, 1, 1])


def test_perfect_predictions_are_diagonal():
    m = confusion([0, 1, 2, 1], [0, 1, 2, 1], 3)
    assert np.array_equal(m.counts, np.diag([1, 2, 1]))


def test_hand_counted_binary_example():
    m = confusion([1, 0, 0, 1], [1, 1, 0, 0], 2)
    # TP=1, FN=1, TN=1, FP=1
    assert np.array_equal(m.counts, [[1, 1], [1, 1]])


def test_fixture_matrix_layout():
    m = confusion(FIXTURE_PREDS, FIXTURE_LABELS, 2)
    assert np.array_equal(m.counts, [[3, 2], [1, 4]])
    assert m.total == 10


def test_fixture_metrics_match_definitions():
    metrics = diagnosis_metrics(confusion(FIXTURE_PREDS, FIXTURE_LABELS, 2))
    assert metrics.accuracy == pytest.approx(0.7)
    assert metrics.specificity == pytest.approx(0.6)
    assert metrics.sensitivity == pytest.approx(0.8)


def test_diagonal_matrix_scores_one():
    metrics = diagnosis_metrics(ConfusionMatrix(np.diag([4, 6])))
    assert metrics.accuracy == 1.0
    assert metrics.specificity == 1.0
    assert metrics.sensitivity == 1.0


def test_no_positive_samples_leaves_sensitivity_undefined():
    m = confusion([0, 0, 1], [0, 0, 0], 2)
    metrics = diagnosis_metrics(m)
    assert metrics.sensitivity is None
    assert metrics.specificity == pytest.approx(2 / 3)
    assert metrics.accuracy == pytest.approx(2 / 3)


def test_out_of_range_ids_rejected():
    with pytest.raises(ValueError):
        confusion([0, 2], [0, 1], 2)
    with pytest.raises(ValueError):
        confusion([0, -1], [0, 1], 2)
    with pytest.raises(ValueError):
        confusion([], [], 2)


def test_all_zero_matrix_rejected():
    with pytest.raises(ValueError):
        diagnosis_metrics(ConfusionMatrix(np.zeros((2, 2), dtype=int)))


def test_multiclass_macro_average():
    preds = [0, 1, 2, 2, 1, 0]
    labels = [0, 1, 2, 0, 1, 2]
    m = confusion(preds, labels, 3)
    metrics = diagnosis_metrics(m)
    assert metrics.accuracy == pytest.approx(4 / 6)
    # one-vs-rest macro averages, computed by hand:
    # class 0: tp=1 fn=1 fp=1 tn=3; class 1: tp=2 fn=0 fp=0 tn=4;
    # class 2: tp=1 fn=1 fp=1 tn=3
    assert metrics.specificity == pytest.approx((3 / 4 + 4 / 4 + 3 / 4) / 3)
    assert metrics.sensitivity == pytest.approx((1 / 2 + 2 / 2 + 1 / 2) / 3)
