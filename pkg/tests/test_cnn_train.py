import numpy as np
import pytest

from spectral_bench.cnn.model import CnnConfig, CnnModel, ConvBlockSpec
from spectral_bench.cnn.train import train, training_accuracy
from spectral_bench.exceptions import ShapeError
from spectral_bench.rng import Rng
from helpers import separable_dataset

SMALL_ARCH = dict(conv_blocks=(ConvBlockSpec(4, 3, 2),), dense_hidden=(8,))


def test_learns_separable_classes():
    data = separable_dataset()
    config = CnnConfig(num_classes=2, dropout_rate=0.1, learning_rate=0.001,
                       epochs=120, batch_size=10, seed=1)
    model, trace = train(config, data)
    assert len(trace) == 120
    assert training_accuracy(model, data) == 1.0


def test_same_seed_identical_loss_trace():
    data = separable_dataset()
    config = CnnConfig(num_classes=2, epochs=5, batch_size=10,
                       dropout_rate=0.2, seed=3, **SMALL_ARCH)
    _, t1 = train(config, data, Rng(42))
    _, t2 = train(config, data, Rng(42))
    assert t1 == t2  # bitwise


def test_zero_learning_rate_keeps_initial_weights():
    data = separable_dataset(n_per_class=6)
    config = CnnConfig(num_classes=2, epochs=1, batch_size=12,
                       learning_rate=0.0, dropout_rate=0.0, seed=7, **SMALL_ARCH)
    model, _ = train(config, data, Rng(7))
    fresh = CnnModel.build(config, data.n_features, Rng(7))
    for name in model.params:
        assert np.array_equal(model.params[name], fresh.params[name])
    assert model.adam.t > 0  # steps were taken, they just moved nothing


def test_small_lr_full_batch_loss_decreases():
    data = separable_dataset(n_per_class=8, seed=9)
    config = CnnConfig(num_classes=2, epochs=10, batch_size=16,
                       learning_rate=1e-4, dropout_rate=0.0, seed=2, **SMALL_ARCH)
    _, trace = train(config, data, Rng(2))
    assert trace[-1] < trace[0]


def test_batch_size_larger_than_dataset_rejected():
    data = separable_dataset(n_per_class=3)
    config = CnnConfig(num_classes=2, epochs=1, batch_size=7, **SMALL_ARCH)
    with pytest.raises(ValueError, match="batch_size"):
        train(config, data)


def test_class_count_mismatch_rejected():
    data = separable_dataset(n_per_class=4)
    config = CnnConfig(num_classes=3, epochs=1, batch_size=4, **SMALL_ARCH)
    with pytest.raises(ValueError, match="num_classes"):
        train(config, data)


def test_weighted_loss_variant_trains():
    data = separable_dataset(n_per_class=6)
    config = CnnConfig(num_classes=2, epochs=3, batch_size=6, loss="weighted",
                       seed=5, **SMALL_ARCH)
    _, trace = train(config, data, Rng(5))
    assert all(np.isfinite(trace))


def test_predictions_on_fit_model_match_labels():
    data = separable_dataset()
    config = CnnConfig(num_classes=2, learning_rate=0.001, epochs=120,
                       batch_size=10, dropout_rate=0.1, seed=1)
    model, _ = train(config, data)
    preds, probs = model.predict(data.rows)
    assert np.array_equal(preds, data.labels)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)


def test_probabilities_sum_to_one_on_random_inputs():
    config = CnnConfig(num_classes=4, epochs=1, batch_size=2, **SMALL_ARCH)
    model = CnnModel.build(config, input_length=20, rng=Rng(0))
    rows = np.random.default_rng(1).standard_normal((10, 20))
    _, probs = model.predict(rows)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(probs > 0)


def test_logit_ties_break_to_lowest_class_id():
    config = CnnConfig(num_classes=3, epochs=1, batch_size=2, **SMALL_ARCH)
    model = CnnModel.build(config, input_length=20, rng=Rng(0))
    for p in model.params.values():
        p[...] = 0.0  # all logits equal
    preds, _ = model.predict(np.random.default_rng(2).standard_normal((5, 20)))
    assert np.array_equal(preds, np.zeros(5))


def test_inference_ignores_dropout_rate():
    data = separable_dataset(n_per_class=5)
    base = dict(num_classes=2, epochs=2, batch_size=5, seed=11, **SMALL_ARCH)
    m1, _ = train(CnnConfig(dropout_rate=0.0, **base), data, Rng(11))
    m2, _ = train(CnnConfig(dropout_rate=0.0, **base), data, Rng(11))
    p1, _ = m1.predict(data.rows)
    p2, _ = m2.predict(data.rows)
    assert np.array_equal(p1, p2)
    # repeated prediction with an aggressive dropout rate is still stable
    m3, _ = train(CnnConfig(dropout_rate=0.7, **base), data, Rng(11))
    a, _ = m3.predict(data.rows)
    b, _ = m3.predict(data.rows)
    assert np.array_equal(a, b)


def test_predict_rejects_wrong_length():
    config = CnnConfig(num_classes=2, epochs=1, batch_size=2, **SMALL_ARCH)
    model = CnnModel.build(config, input_length=20, rng=Rng(0))
    with pytest.raises(ShapeError):
        model.predict(np.zeros((3, 19)))


def test_features_have_penultimate_width():
    config = CnnConfig(num_classes=2, epochs=1, batch_size=2,
                       conv_blocks=(ConvBlockSpec(4, 3, 2),), dense_hidden=(6,))
    model = CnnModel.build(config, input_length=20, rng=Rng(0))
    feats = model.features(np.zeros((3, 20)))
    assert feats.shape == (3, 6)
