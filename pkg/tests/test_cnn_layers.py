import math

import numpy as np
import pytest

from spectral_bench.cnn import layers
from spectral_bench.cnn.loss import batch_cross_entropy, class_weights, cross_entropy
from spectral_bench.cnn.model import CnnConfig, ConvBlockSpec, conv_stack_shapes
from spectral_bench.exceptions import ShapeError


def test_identity_kernel_passthrough():
    x = np.random.default_rng(0).standard_normal((2, 1, 6))
    y = layers.conv1d_forward(x, np.ones((1, 1, 1)), np.zeros(1))
    assert np.array_equal(y, x)


def test_first_difference_kernel():
    x = np.array([[[1.0, 2.0, 3.0, 4.0]]])
    y = layers.conv1d_forward(x, np.array([[[1.0, -1.0]]]), np.zeros(1))
    assert np.allclose(y, [[[-1.0, -1.0, -1.0]]])


def test_conv_shape_errors():
    x = np.zeros((1, 2, 5))
    with pytest.raises(ShapeError):
        layers.conv1d_forward(x, np.zeros((1, 3, 2)), np.zeros(1))  # channels
    with pytest.raises(ShapeError):
        layers.conv1d_forward(x, np.zeros((1, 2, 6)), np.zeros(1))  # too long
    with pytest.raises(ShapeError):
        layers.conv1d_forward(x, np.zeros((2, 2, 2)), np.zeros(1))  # bias size


def test_pool_identity_and_example():
    x = np.array([[[3.0, 1.0, 4.0, 1.0, 5.0, 9.0]]])
    y1, _ = layers.maxpool1d(x, 1)
    assert np.array_equal(y1, x)
    y2, _ = layers.maxpool1d(x, 2)
    assert np.allclose(y2, [[[3.0, 4.0, 9.0]]])


def test_pool_drops_trailing_remainder():
    x = np.arange(7.0).reshape(1, 1, 7)
    y, _ = layers.maxpool1d(x, 3)
    assert y.shape == (1, 1, 2)
    assert np.allclose(y, [[[2.0, 5.0]]])


def test_relu():
    assert np.array_equal(layers.relu(np.array([-1.0, 0.0, 2.0])), [0.0, 0.0, 2.0])


def test_softmax_uniform_and_stability():
    assert np.allclose(layers.softmax(np.zeros(3)), np.full(3, 1 / 3), atol=1e-15)
    out = layers.softmax(np.array([1000.0, 0.0]))
    assert np.all(np.isfinite(out))
    assert np.allclose(out, [1.0, 0.0], atol=1e-12)
    batch = layers.softmax(np.random.default_rng(0).standard_normal((8, 5)) * 50)
    assert np.all(batch > 0) and np.all(batch < 1)
    assert np.allclose(batch.sum(axis=1), 1.0, atol=1e-12)


def test_dense_forward():
    w = np.array([[1.0, 2.0], [0.0, -1.0]])
    b = np.array([0.5, 0.0])
    assert np.allclose(layers.dense_forward(np.array([1.0, 1.0]), w, b),
                       [3.5, -1.0])
    with pytest.raises(ShapeError):
        layers.dense_forward(np.zeros(3), w, b)


def test_cross_entropy_examples():
    assert cross_entropy([1.0, 0.0], [1.0, 1e-12]) == pytest.approx(0.0, abs=1e-9)
    assert cross_entropy([0.0, 1.0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-12)
    assert cross_entropy([0.0, 0.0, 1.0], [0.2, 0.3, 0.5]) == pytest.approx(
        -math.log(0.5), abs=1e-12)


def test_cross_entropy_validation():
    with pytest.raises(ShapeError):
        cross_entropy([1.0, 0.0], [0.2, 0.3, 0.5])
    with pytest.raises(ValueError):
        cross_entropy([1.0, 0.0], [0.9, 0.2])  # does not sum to 1
    assert cross_entropy([1.0, 0.0], [0.0, 1.0]) >= 0  # clamped log


def test_cross_entropy_nonnegative_property():
    gen = np.random.default_rng(4)
    for _ in range(50):
        p = gen.uniform(0.01, 1.0, size=4)
        p /= p.sum()
        onehot = np.eye(4)[gen.integers(0, 4)]
        assert cross_entropy(onehot, p) >= 0.0


def test_inverse_frequency_class_weights():
    w = class_weights([0, 0, 0, 1], 2)
    # n_total / (C * n_class): 4/(2*3) and 4/(2*1)
    assert np.allclose(w, [4 / 6, 4 / 2])
    assert class_weights([1, 1], 2)[0] == 0.0  # absent class


def test_batch_cross_entropy_weighted_mean():
    probs = np.array([[0.9, 0.1], [0.4, 0.6]])
    labels = np.array([0, 1])
    plain = batch_cross_entropy(probs, labels)
    assert plain == pytest.approx((-math.log(0.9) - math.log(0.6)) / 2)
    weighted = batch_cross_entropy(probs, labels, np.array([2.0, 0.5]))
    assert weighted == pytest.approx((-2 * math.log(0.9) - 0.5 * math.log(0.6)) / 2)


def test_conv_pool_output_shapes_property_sweep():
    gen = np.random.default_rng(9)
    for kernel in range(1, 8):
        for pool in range(1, 5):
            for length in (8, 17, 33, 64):
                conv_len = length - kernel + 1
                if conv_len < pool:
                    continue
                cfg = CnnConfig(num_classes=2,
                                conv_blocks=(ConvBlockSpec(3, kernel, pool),),
                                dense_hidden=())
                (channels, out_len), = conv_stack_shapes(cfg, length)
                assert channels == 3
                assert out_len == conv_len // pool
                x = gen.standard_normal((2, 1, length))
                w = gen.standard_normal((3, 1, kernel))
                y = layers.conv1d_forward(x, w, np.zeros(3))
                assert y.shape == (2, 3, conv_len)
                p, _ = layers.maxpool1d(y, pool)
                assert p.shape == (2, 3, out_len)
